#pragma once

#include "rcmdp/core.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rcmdp {

/// How the expected next-state value is taken over an uncertainty set.
enum class BellmanMode { nominal, robust_inf, robust_sup, soft_mean };

BellmanMode bellman_mode(ReturnMode mode);
BellmanMode bellman_mode(CostMode mode);

/// Execution strategy for per-state backups. `serial` is the reference loop;
/// `parallel` distributes states over OpenMP threads. Each state's output is
/// written independently, so both produce bitwise-identical results.
enum class Exec { serial, parallel };

/// min / max / mean / nominal of { p_i(.|s,a) . v : i = 1..N }.
double sigma_select(std::span<const double> v, std::size_t s, std::size_t a, const UncertaintySet& set,
                    BellmanMode mode, std::size_t nominal_index);

/// Unguarded policy backup: out(s) = immediate(s, pi(s)) + discount * sigma(v; s, pi(s)).
/// Every mode is allowed; the guarded return/cost wrappers below restrict them.
std::vector<double> policy_backup(const StateActionTable& immediate, const UncertaintySet& set,
                                  std::size_t nominal_index, double discount, const Policy& policy,
                                  std::span<const double> v, BellmanMode mode, Exec exec = Exec::parallel);

/// Q(s, a) = immediate(s, a) + discount * sigma(v; s, a) for every pair.
StateActionTable action_backup(const StateActionTable& immediate, const UncertaintySet& set,
                               std::size_t nominal_index, double discount, std::span<const double> v,
                               BellmanMode mode, Exec exec = Exec::parallel);

/// Return backup. Throws std::invalid_argument for robust_sup.
std::vector<double> bellman_return_apply(const RCMDPInstance& inst, const Policy& policy,
                                         std::span<const double> v, BellmanMode mode, Exec exec = Exec::parallel);

/// Cost backup. Throws std::invalid_argument for robust_inf.
std::vector<double> bellman_cost_apply(const RCMDPInstance& inst, const Policy& policy,
                                       std::span<const double> v_cost, BellmanMode mode,
                                       Exec exec = Exec::parallel);

/// Applies the return and cost operators selected by `spec` to each component
/// of `pair` independently.
ValuePair r3c_apply(const RCMDPInstance& inst, const Policy& policy, const ValuePair& pair,
                    const ObjectiveSpec& spec, Exec exec = Exec::parallel);

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvaluationOptions {
    double tol = 1e-9;
    std::size_t max_iters = 100000;
    Exec exec = Exec::parallel;
};

struct PolicyEvaluation {
    ValuePair values;
    std::size_t iterations = 0;
    /// Joint sup-norm change of the last application.
    double last_change = 0.0;
};

/// Iterates r3c_apply from the zero pair until the joint sup-norm change
/// drops below options.tol. Throws ConvergenceError once max_iters
/// applications have not converged.
PolicyEvaluation policy_evaluation(const RCMDPInstance& inst, const Policy& policy, const ObjectiveSpec& spec,
                                   const EvaluationOptions& options = {});

/// ceil(log(tol (1 - g) / max(|r|, |c|)) / log g), at least 1. The number of
/// applications policy_evaluation needs from the zero pair never exceeds it.
std::size_t iteration_bound(const RCMDPInstance& inst, double tol);

}  // namespace rcmdp
