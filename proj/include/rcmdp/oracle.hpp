#pragma once

#include "rcmdp/core.hpp"
#include "rcmdp/solver.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace rcmdp::oracle {

/// Brute-force ground truth for robust values on tiny instances. Everything
/// here enumerates; nothing samples.

class EnumerationCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Limits {
    std::uint64_t adversary_cap = 10'000'000;
    std::uint64_t policy_cap = 1'000'000;
};

/// Stationary choice of uncertainty-set member at every (state, action).
struct AdversaryAssignment {
    std::size_t n_actions = 0;
    std::vector<std::size_t> choice;  // indexed s * n_actions + a

    std::size_t operator()(std::size_t s, std::size_t a) const { return choice[s * n_actions + a]; }
    bool operator==(const AdversaryAssignment&) const = default;
};

/// N^(|S| |A|); throws EnumerationCapError above `cap`.
std::uint64_t adversary_count(const RCMDPInstance& inst, std::uint64_t cap = Limits{}.adversary_cap);

/// The index-th assignment in lexicographic order, (s=0, a=0) most significant.
AdversaryAssignment adversary_at(const RCMDPInstance& inst, std::uint64_t index);

/// Calls `visit` on every assignment exactly once, in lexicographic order.
void enumerate_adversaries(const RCMDPInstance& inst, const std::function<void(const AdversaryAssignment&)>& visit,
                           std::uint64_t cap = Limits{}.adversary_cap);

/// Kernel whose (s, a) row is taken from member assignment(s, a).
Kernel induced_kernel(const RCMDPInstance& inst, const AdversaryAssignment& assignment);

/// Per-(s, a) average of the member rows.
Kernel mean_kernel(const RCMDPInstance& inst);

/// Exact start-weighted value of `policy` under a single kernel, via a
/// full-pivoting LU solve.
struct KernelValue {
    double j_return = 0.0;
    double j_cost = 0.0;
};
KernelValue kernel_value(const Kernel& kernel, const RCMDPInstance& inst, const Policy& policy,
                         const StartDistribution& start);

enum class Channel { return_value, cost_value };
enum class Extremum { min, max };

struct ExtremalValue {
    double value = 0.0;
    AdversaryAssignment witness;
};

/// min or max over all stationary adversaries of the start-weighted exact value.
/// Ties resolve to the lexicographically first witness.
ExtremalValue brute_force_value(const RCMDPInstance& inst, const Policy& policy, Channel channel, Extremum extremum,
                                const StartDistribution& start, const Limits& limits = {});

struct PolicySearchResult {
    Policy best_policy;
    double best_return = 0.0;
    double cost_return = 0.0;
    bool feasible = false;
};

/// Return objective of a policy under `mode`, by enumeration or exact solve.
double objective_return(const RCMDPInstance& inst, const Policy& policy, ReturnMode mode,
                        const StartDistribution& start, const Limits& limits = {});
/// Cost objective of a policy under `mode`, by enumeration or exact solve.
double objective_cost(const RCMDPInstance& inst, const Policy& policy, CostMode mode, const StartDistribution& start,
                      const Limits& limits = {});

/// Enumerates every deterministic policy. Among those whose cost objective
/// (spec.cost_mode) is <= beta, returns the best return objective
/// (spec.return_mode); with none feasible, returns the least-violating policy.
PolicySearchResult brute_force_policy_search(const RCMDPInstance& inst, const ObjectiveSpec& spec, double beta,
                                             const StartDistribution& start, const Limits& limits = {});

}  // namespace rcmdp::oracle
