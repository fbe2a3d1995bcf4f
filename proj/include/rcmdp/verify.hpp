#pragma once

#include "rcmdp/core.hpp"
#include "rcmdp/operators.hpp"
#include "rcmdp/random.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rcmdp::verify {

/// Outcome of one sampled property. `max_violation` is the largest observed
/// amount by which the property's inequality or equality was missed (<= 0 or
/// exactly 0 when it always held); it is compared against `tolerance`.
struct PropertyResult {
    std::string name;
    std::size_t samples = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::string detail;
};

/// A policy backup under test: maps (instance, policy, v) to the backed-up vector.
using Backup = std::function<std::vector<double>(const RCMDPInstance&, const Policy&, std::span<const double>)>;

inline constexpr double kContractionSlack = 1e-12;
inline constexpr double kOracleTolerance = 1e-8;
inline constexpr double kFixedPointTolerance = 1e-9;

/// Discounts the contraction and fixed-point checks cycle through.
inline constexpr double kSampleDiscounts[] = {0.5, 0.9, 0.99};

/// |T U - T V|_inf <= g |U - V|_inf + 1e-12 over `samples` random
/// (instance, policy, U, V); every fourth sample uses V = U + c, where the
/// bound is tight.
PropertyResult check_contraction(const std::string& name, const Backup& backup, Rng& rng, std::size_t samples);

/// Contraction of every backup: return inf / nominal / soft-mean, cost sup /
/// nominal / soft-mean, and both components of the R3C operator.
std::vector<PropertyResult> check_all_contractions(Rng& rng, std::size_t samples);

/// inf <= soft_mean <= sup and nominal within [inf, sup].
PropertyResult check_mode_ordering(Rng& rng, std::size_t samples);
/// With a single member all four selections agree exactly.
PropertyResult check_degenerate_set(Rng& rng, std::size_t samples);
/// U <= V pointwise implies T U <= T V pointwise, every mode.
PropertyResult check_monotonicity(Rng& rng, std::size_t samples);
/// sup-backup(v; c) == -inf-backup(-v; -c), bitwise.
PropertyResult check_negation_duality(Rng& rng, std::size_t samples);
/// Serial and OpenMP backups agree bitwise.
PropertyResult check_parallel_determinism(Rng& rng, std::size_t samples);
/// policy_evaluation stays within iteration_bound and re-applying the
/// operator to its result moves it by < 1e-9.
PropertyResult check_fixed_point(Rng& rng, std::size_t samples);
/// Robust fixed points equal brute-force stationary-adversary extrema within
/// 1e-8, on instances with |S| <= 4, |A| <= 2, N <= 3. `witness` reports the
/// re-evaluation check of each returned witness (tolerance 1e-10).
struct OracleCertification {
    PropertyResult value;
    PropertyResult witness;
};
OracleCertification check_oracle_certification(Rng& rng, std::size_t instances);
/// Dense exact evaluation agrees with iterative evaluation on N = 1 within 1e-9.
PropertyResult check_exact_vs_iterative(Rng& rng, std::size_t samples);
/// Solver final policy vs brute-force best on tiny instances; gaps are reported
/// in `detail` and never fail the property.
PropertyResult report_solver_gap(Rng& rng, std::size_t instances);

enum class Level { quick, full };

std::vector<PropertyResult> run_verification(Level level, std::uint64_t seed);

}  // namespace rcmdp::verify
