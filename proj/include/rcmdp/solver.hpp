#pragma once

#include "rcmdp/core.hpp"
#include "rcmdp/operators.hpp"

#include <cstddef>
#include <vector>

namespace rcmdp {

/// Probability weights over start states.
class StartDistribution {
public:
    /// Throws std::invalid_argument unless weights are >= 0 and sum to 1 within 1e-12.
    explicit StartDistribution(std::vector<double> weights);
    static StartDistribution point_mass(std::size_t n_states, std::size_t state);

    std::size_t size() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    /// Start-weighted value; throws on length mismatch.
    double expect(std::span<const double> v) const;

private:
    std::vector<double> weights_;
};

struct QValues {
    StateActionTable q_return;
    StateActionTable q_cost;
};

/// One-step lookahead of both value components under the objective's modes.
QValues q_values(const RCMDPInstance& inst, const ValuePair& pair, const ObjectiveSpec& spec,
                 Exec exec = Exec::parallel);

/// argmax_a Q_return(s, a) - lambda Q_cost(s, a), lowest action index on ties.
Policy greedy_improve(const RCMDPInstance& inst, const ValuePair& pair, const ObjectiveSpec& spec, double lambda,
                      Exec exec = Exec::parallel);
Policy greedy_improve(const QValues& q, double lambda);

struct InnerOptions {
    EvaluationOptions evaluation{1e-11, 100000, Exec::parallel};
    std::size_t max_sweeps = 1000;
};

struct InnerResult {
    Policy policy;
    ValuePair values;
    std::size_t sweeps = 0;
    /// True when greedy improvement revisited an earlier policy instead of
    /// reaching a stable one.
    bool cycled = false;
};

/// Policy iteration on the lambda-combined value. Starts from `initial` (all
/// zeros if empty). On a cycle, or when max_sweeps runs out, returns the visited
/// policy with the best start-weighted combined value.
InnerResult inner_policy_iteration(const RCMDPInstance& inst, const ObjectiveSpec& spec, double lambda,
                                   const StartDistribution& start, const InnerOptions& options = {},
                                   const Policy& initial = {});

/// lambda' = clip(lambda + step (worst_case_cost_return - beta), 0, lambda_max).
LagrangeState lagrange_step(const LagrangeState& state, double worst_case_cost_return, double beta);

/// The cost mode the multiplier update uses: sup for RC, R3C and SR3C, nominal for C and R.
CostMode constraint_mode(const ObjectiveSpec& spec);

struct SolveOptions {
    std::size_t outer_iters = 2000;
    /// lambda convergence threshold and feasibility slack on the cost return.
    double tol = 1e-9;
    InnerOptions inner;
};

struct SolveRecord {
    std::size_t iteration = 0;
    /// Multiplier the inner optimization ran with.
    double lambda = 0.0;
    /// Multiplier after the update driven by this record's cost return.
    double lambda_next = 0.0;
    double worst_case_cost_return = 0.0;
    double return_value = 0.0;
    bool policy_changed = false;
    Policy policy;
};

struct SolveReport {
    Policy policy;
    double lambda_final = 0.0;
    std::vector<SolveRecord> history;
    bool converged = false;
    bool feasible = false;
    std::size_t iterations_used = 0;
    /// Objective values of the reported policy.
    double return_value = 0.0;
    double worst_case_cost_return = 0.0;
};

/// Alternating Lagrangian optimization: exact inner policy iteration at the
/// current multiplier, then one projected ascent step on lambda. Reports the
/// best feasible visited policy (highest return), or the lowest-cost one when
/// none is feasible.
SolveReport solve(const RCMDPInstance& inst, const ObjectiveSpec& spec, const StartDistribution& start,
                  const LagrangeState& lagrange, const SolveOptions& options = {});

}  // namespace rcmdp
