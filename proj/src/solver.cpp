#include "rcmdp/solver.hpp"

#include <algorithm>
#include <cmath>

namespace rcmdp {

StartDistribution::StartDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("start distribution is empty");
    double mass = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("start weights must be finite and >= 0");
        mass += w;
    }
    if (!(std::abs(mass - 1.0) <= kRowMassTolerance)) {
        throw std::invalid_argument("start weights must sum to 1");
    }
}

StartDistribution StartDistribution::point_mass(std::size_t n_states, std::size_t state) {
    if (state >= n_states) throw std::invalid_argument("start state out of range");
    std::vector<double> w(n_states, 0.0);
    w[state] = 1.0;
    return StartDistribution(std::move(w));
}

double StartDistribution::expect(std::span<const double> v) const {
    if (v.size() != weights_.size()) throw std::invalid_argument("start distribution length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += weights_[i] * v[i];
    return acc;
}

QValues q_values(const RCMDPInstance& inst, const ValuePair& pair, const ObjectiveSpec& spec, Exec exec) {
    return {action_backup(inst.reward(), inst.uncertainty(), inst.nominal_index(), inst.discount(), pair.v_return,
                          bellman_mode(spec.return_mode), exec),
            action_backup(inst.cost(), inst.uncertainty(), inst.nominal_index(), inst.discount(), pair.v_cost,
                          bellman_mode(spec.cost_mode), exec)};
}

Policy greedy_improve(const QValues& q, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("greedy_improve: lambda must be >= 0");
    const std::size_t n_states = q.q_return.n_states();
    const std::size_t n_actions = q.q_return.n_actions();
    std::vector<std::size_t> actions(n_states, 0);
    for (std::size_t s = 0; s < n_states; ++s) {
        double best = q.q_return(s, 0) - lambda * q.q_cost(s, 0);
        for (std::size_t a = 1; a < n_actions; ++a) {
            const double x = q.q_return(s, a) - lambda * q.q_cost(s, a);
            if (x > best) {
                best = x;
                actions[s] = a;
            }
        }
    }
    return Policy(std::move(actions));
}

Policy greedy_improve(const RCMDPInstance& inst, const ValuePair& pair, const ObjectiveSpec& spec, double lambda,
                      Exec exec) {
    return greedy_improve(q_values(inst, pair, spec, exec), lambda);
}

InnerResult inner_policy_iteration(const RCMDPInstance& inst, const ObjectiveSpec& spec, double lambda,
                                   const StartDistribution& start, const InnerOptions& options,
                                   const Policy& initial) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("inner_policy_iteration: lambda must be >= 0");
    if (start.size() != inst.n_states()) throw std::invalid_argument("start distribution length mismatch");

    Policy policy = initial.size() == 0 ? Policy::constant(inst.n_states(), 0) : initial;
    policy.check_against(inst);

    struct Visited {
        Policy policy;
        ValuePair values;
        double combined;
    };
    std::vector<Visited> visited;

    auto best_visited = [&](std::size_t sweeps) {
        auto best = std::max_element(visited.begin(), visited.end(),
                                     [](const Visited& a, const Visited& b) { return a.combined < b.combined; });
        return InnerResult{best->policy, best->values, sweeps, true};
    };

    for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        auto eval = policy_evaluation(inst, policy, spec, options.evaluation);
        const double combined = start.expect(combined_value(eval.values, lambda));
        Policy next = greedy_improve(inst, eval.values, spec, lambda, options.evaluation.exec);
        if (next == policy) return {std::move(policy), std::move(eval.values), sweep, false};

        visited.push_back({std::move(policy), std::move(eval.values), combined});
        const bool seen = std::any_of(visited.begin(), visited.end(),
                                      [&](const Visited& v) { return v.policy == next; });
        if (seen) return best_visited(sweep);
        policy = std::move(next);
    }
    throw ConvergenceError("inner policy iteration exceeded " + std::to_string(options.max_sweeps) + " sweeps");
}

LagrangeState lagrange_step(const LagrangeState& state, double worst_case_cost_return, double beta) {
    return state.with_lambda(state.lambda() + state.step_size() * (worst_case_cost_return - beta));
}

CostMode constraint_mode(const ObjectiveSpec& spec) {
    switch (spec.preset) {
        case Preset::C:
        case Preset::R: return CostMode::nominal;
        case Preset::RC:
        case Preset::R3C:
        case Preset::SR3C: return CostMode::robust_sup;
    }
    return CostMode::robust_sup;
}

SolveReport solve(const RCMDPInstance& inst, const ObjectiveSpec& spec, const StartDistribution& start,
                  const LagrangeState& lagrange, const SolveOptions& options) {
    if (options.outer_iters < 1) throw std::invalid_argument("solve: outer_iters must be >= 1");
    if (!(options.tol > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
    if (start.size() != inst.n_states()) throw std::invalid_argument("start distribution length mismatch");

    const double beta = inst.threshold_beta();
    const CostMode cmode = constraint_mode(spec);
    const ObjectiveSpec constraint_spec{spec.return_mode, cmode, spec.preset};

    SolveReport report;
    LagrangeState state = lagrange;
    Policy policy = Policy::constant(inst.n_states(), 0);

    for (std::size_t k = 0; k < options.outer_iters; ++k) {
        InnerResult inner = inner_policy_iteration(inst, spec, state.lambda(), start, options.inner, policy);

        const double j_return = start.expect(inner.values.v_return);
        double j_cost;
        if (cmode == spec.cost_mode) {
            j_cost = start.expect(inner.values.v_cost);
        } else {
            j_cost = start.expect(policy_evaluation(inst, inner.policy, constraint_spec, options.inner.evaluation)
                                      .values.v_cost);
        }

        const LagrangeState next = lagrange_step(state, j_cost, beta);
        const bool changed = inner.policy != policy;
        report.history.push_back({k, state.lambda(), next.lambda(), j_cost, j_return, changed, inner.policy});

        const double delta = std::abs(next.lambda() - state.lambda());
        policy = std::move(inner.policy);
        state = next;
        if (delta < options.tol && !changed) {
            report.converged = true;
            break;
        }
    }

    report.iterations_used = report.history.size();
    report.lambda_final = state.lambda();

    const SolveRecord* best = nullptr;
    for (const auto& rec : report.history) {
        if (rec.worst_case_cost_return <= beta + options.tol &&
            (best == nullptr || rec.return_value > best->return_value)) {
            best = &rec;
        }
    }
    report.feasible = best != nullptr;
    if (!report.feasible) {
        for (const auto& rec : report.history) {
            if (best == nullptr || rec.worst_case_cost_return < best->worst_case_cost_return) best = &rec;
        }
    }
    report.policy = best->policy;
    report.return_value = best->return_value;
    report.worst_case_cost_return = best->worst_case_cost_return;
    return report;
}

}  // namespace rcmdp
