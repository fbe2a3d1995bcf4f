#include "rcmdp/operators.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rcmdp {

BellmanMode bellman_mode(ReturnMode mode) {
    switch (mode) {
        case ReturnMode::nominal: return BellmanMode::nominal;
        case ReturnMode::robust_inf: return BellmanMode::robust_inf;
        case ReturnMode::soft_mean: return BellmanMode::soft_mean;
    }
    throw std::invalid_argument("unknown return mode");
}

BellmanMode bellman_mode(CostMode mode) {
    switch (mode) {
        case CostMode::nominal: return BellmanMode::nominal;
        case CostMode::robust_sup: return BellmanMode::robust_sup;
        case CostMode::soft_mean: return BellmanMode::soft_mean;
    }
    throw std::invalid_argument("unknown cost mode");
}

namespace {

double dot(std::span<const double> p, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * v[i];
    return acc;
}

void check_value_length(std::span<const double> v, std::size_t n_states) {
    if (v.size() != n_states) {
        throw std::invalid_argument("value vector has length " + std::to_string(v.size()) + ", expected " +
                                    std::to_string(n_states));
    }
}

}  // namespace

double sigma_select(std::span<const double> v, std::size_t s, std::size_t a, const UncertaintySet& set,
                    BellmanMode mode, std::size_t nominal_index) {
    const auto& members = set.members;
    if (mode == BellmanMode::nominal) return dot(members[nominal_index].row(s, a), v);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const double x = dot(members[i].row(s, a), v);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum = i == 0 ? x : sum + x;
    }
    switch (mode) {
        case BellmanMode::robust_inf: return lo;
        case BellmanMode::robust_sup: return hi;
        case BellmanMode::soft_mean:
            // rounding in the sum must not push the mean outside [min, max]
            return std::clamp(sum / static_cast<double>(members.size()), lo, hi);
        case BellmanMode::nominal: break;
    }
    return lo;
}

std::vector<double> policy_backup(const StateActionTable& immediate, const UncertaintySet& set,
                                  std::size_t nominal_index, double discount, const Policy& policy,
                                  std::span<const double> v, BellmanMode mode, Exec exec) {
    const std::size_t n = policy.size();
    check_value_length(v, n);
    std::vector<double> out(n);
    detail::for_each_index(n, exec, [&](std::size_t s) {
        const std::size_t a = policy(s);
        out[s] = immediate(s, a) + discount * sigma_select(v, s, a, set, mode, nominal_index);
    });
    return out;
}

StateActionTable action_backup(const StateActionTable& immediate, const UncertaintySet& set,
                               std::size_t nominal_index, double discount, std::span<const double> v,
                               BellmanMode mode, Exec exec) {
    const std::size_t n_states = immediate.n_states();
    const std::size_t n_actions = immediate.n_actions();
    check_value_length(v, n_states);
    StateActionTable q(n_states, n_actions);
    detail::for_each_index(n_states, exec, [&](std::size_t s) {
        for (std::size_t a = 0; a < n_actions; ++a) {
            q(s, a) = immediate(s, a) + discount * sigma_select(v, s, a, set, mode, nominal_index);
        }
    });
    return q;
}

std::vector<double> bellman_return_apply(const RCMDPInstance& inst, const Policy& policy,
                                         std::span<const double> v, BellmanMode mode, Exec exec) {
    if (mode == BellmanMode::robust_sup) {
        throw std::invalid_argument("return backups never take the supremum over the uncertainty set");
    }
    policy.check_against(inst);
    return policy_backup(inst.reward(), inst.uncertainty(), inst.nominal_index(), inst.discount(), policy, v, mode,
                         exec);
}

std::vector<double> bellman_cost_apply(const RCMDPInstance& inst, const Policy& policy,
                                       std::span<const double> v_cost, BellmanMode mode, Exec exec) {
    if (mode == BellmanMode::robust_inf) {
        throw std::invalid_argument("cost backups never take the infimum over the uncertainty set");
    }
    policy.check_against(inst);
    return policy_backup(inst.cost(), inst.uncertainty(), inst.nominal_index(), inst.discount(), policy, v_cost,
                         mode, exec);
}

ValuePair r3c_apply(const RCMDPInstance& inst, const Policy& policy, const ValuePair& pair,
                    const ObjectiveSpec& spec, Exec exec) {
    return {bellman_return_apply(inst, policy, pair.v_return, bellman_mode(spec.return_mode), exec),
            bellman_cost_apply(inst, policy, pair.v_cost, bellman_mode(spec.cost_mode), exec)};
}

PolicyEvaluation policy_evaluation(const RCMDPInstance& inst, const Policy& policy, const ObjectiveSpec& spec,
                                   const EvaluationOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("policy_evaluation: tol must be > 0");
    policy.check_against(inst);

    PolicyEvaluation result{ValuePair::zeros(inst.n_states()), 0, 0.0};
    // the operator is constant when nothing is discounted
    if (inst.discount() == 0.0) {
        result.values = r3c_apply(inst, policy, result.values, spec, options.exec);
        result.iterations = 1;
        return result;
    }
    while (result.iterations < options.max_iters) {
        ValuePair next = r3c_apply(inst, policy, result.values, spec, options.exec);
        ++result.iterations;
        result.last_change = std::max(sup_norm_diff(next.v_return, result.values.v_return),
                                      sup_norm_diff(next.v_cost, result.values.v_cost));
        result.values = std::move(next);
        if (result.last_change < options.tol) return result;
    }
    throw ConvergenceError("policy_evaluation did not reach tol " + std::to_string(options.tol) + " within " +
                           std::to_string(options.max_iters) + " iterations");
}

std::size_t iteration_bound(const RCMDPInstance& inst, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("iteration_bound: tol must be > 0");
    const double scale = std::max(inst.reward().max_abs(), inst.cost().max_abs());
    const double g = inst.discount();
    if (scale == 0.0 || g == 0.0) return 1;
    const double k = std::ceil(std::log(tol * (1.0 - g) / scale) / std::log(g));
    return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

}  // namespace rcmdp
