#include "rcmdp/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace rcmdp::oracle {

std::uint64_t adversary_count(const RCMDPInstance& inst, std::uint64_t cap) {
    const std::uint64_t n = inst.uncertainty().size();
    const std::size_t slots = inst.n_states() * inst.n_actions();
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < slots; ++i) {
        if (n > 1 && count > cap / n) {
            throw EnumerationCapError("adversary enumeration exceeds cap of " + std::to_string(cap));
        }
        count *= n;
    }
    if (count > cap) throw EnumerationCapError("adversary enumeration exceeds cap of " + std::to_string(cap));
    return count;
}

AdversaryAssignment adversary_at(const RCMDPInstance& inst, std::uint64_t index) {
    const std::uint64_t n = inst.uncertainty().size();
    AdversaryAssignment out{inst.n_actions(), std::vector<std::size_t>(inst.n_states() * inst.n_actions(), 0)};
    for (std::size_t i = out.choice.size(); i-- > 0;) {
        out.choice[i] = static_cast<std::size_t>(index % n);
        index /= n;
    }
    return out;
}

void enumerate_adversaries(const RCMDPInstance& inst, const std::function<void(const AdversaryAssignment&)>& visit,
                           std::uint64_t cap) {
    const std::uint64_t count = adversary_count(inst, cap);
    const std::size_t n = inst.uncertainty().size();
    AdversaryAssignment current{inst.n_actions(), std::vector<std::size_t>(inst.n_states() * inst.n_actions(), 0)};
    for (std::uint64_t k = 0; k < count; ++k) {
        visit(current);
        // odometer increment, last slot fastest
        for (std::size_t i = current.choice.size(); i-- > 0;) {
            if (++current.choice[i] < n) break;
            current.choice[i] = 0;
        }
    }
}

Kernel induced_kernel(const RCMDPInstance& inst, const AdversaryAssignment& assignment) {
    Kernel k(inst.n_states(), inst.n_actions());
    for (std::size_t s = 0; s < inst.n_states(); ++s) {
        for (std::size_t a = 0; a < inst.n_actions(); ++a) {
            const auto src = inst.uncertainty().members.at(assignment(s, a)).row(s, a);
            auto dst = k.row(s, a);
            std::copy(src.begin(), src.end(), dst.begin());
        }
    }
    return k;
}

Kernel mean_kernel(const RCMDPInstance& inst) {
    const auto& members = inst.uncertainty().members;
    Kernel k(inst.n_states(), inst.n_actions());
    for (std::size_t s = 0; s < inst.n_states(); ++s) {
        for (std::size_t a = 0; a < inst.n_actions(); ++a) {
            auto dst = k.row(s, a);
            for (const Kernel& m : members) {
                const auto src = m.row(s, a);
                for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += src[t];
            }
            for (double& p : dst) p /= static_cast<double>(members.size());
        }
    }
    return k;
}

KernelValue kernel_value(const Kernel& kernel, const RCMDPInstance& inst, const Policy& policy,
                         const StartDistribution& start) {
    const auto n = static_cast<Eigen::Index>(inst.n_states());
    Eigen::MatrixXd system(n, n);
    Eigen::MatrixXd rhs(n, 2);
    for (Eigen::Index s = 0; s < n; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const std::size_t a = policy(su);
        for (Eigen::Index t = 0; t < n; ++t) {
            system(s, t) = (s == t ? 1.0 : 0.0) - inst.discount() * kernel(su, a, static_cast<std::size_t>(t));
        }
        rhs(s, 0) = inst.reward()(su, a);
        rhs(s, 1) = inst.cost()(su, a);
    }
    const Eigen::MatrixXd v = system.fullPivLu().solve(rhs);
    KernelValue out;
    for (Eigen::Index s = 0; s < n; ++s) {
        const double w = start.weights()[static_cast<std::size_t>(s)];
        out.j_return += w * v(s, 0);
        out.j_cost += w * v(s, 1);
    }
    return out;
}

ExtremalValue brute_force_value(const RCMDPInstance& inst, const Policy& policy, Channel channel, Extremum extremum,
                                const StartDistribution& start, const Limits& limits) {
    policy.check_against(inst);
    if (start.size() != inst.n_states()) throw std::invalid_argument("start distribution length mismatch");
    const std::uint64_t count = adversary_count(inst, limits.adversary_cap);

    const auto better = [&](double a, double b) { return extremum == Extremum::min ? a < b : a > b; };
    double best_value = extremum == Extremum::min ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity();
    std::uint64_t best_index = 0;
    const auto total = static_cast<std::int64_t>(count);

#pragma omp parallel
    {
        double local_value = best_value;
        std::uint64_t local_index = std::numeric_limits<std::uint64_t>::max();
#pragma omp for schedule(static) nowait
        for (std::int64_t k = 0; k < total; ++k) {
            const auto idx = static_cast<std::uint64_t>(k);
            const KernelValue kv = kernel_value(induced_kernel(inst, adversary_at(inst, idx)), inst, policy, start);
            const double x = channel == Channel::return_value ? kv.j_return : kv.j_cost;
            // ascending index within a thread, so strict improvement keeps the first witness
            if (local_index == std::numeric_limits<std::uint64_t>::max() || better(x, local_value)) {
                local_value = x;
                local_index = idx;
            }
        }
#pragma omp critical
        {
            if (local_index != std::numeric_limits<std::uint64_t>::max()) {
                if (better(local_value, best_value) || (local_value == best_value && local_index < best_index)) {
                    best_value = local_value;
                    best_index = local_index;
                }
            }
        }
    }
    return {best_value, adversary_at(inst, best_index)};
}

double objective_return(const RCMDPInstance& inst, const Policy& policy, ReturnMode mode,
                        const StartDistribution& start, const Limits& limits) {
    switch (mode) {
        case ReturnMode::nominal: return kernel_value(inst.nominal_kernel(), inst, policy, start).j_return;
        case ReturnMode::robust_inf:
            return brute_force_value(inst, policy, Channel::return_value, Extremum::min, start, limits).value;
        case ReturnMode::soft_mean: return kernel_value(mean_kernel(inst), inst, policy, start).j_return;
    }
    throw std::invalid_argument("unknown return mode");
}

double objective_cost(const RCMDPInstance& inst, const Policy& policy, CostMode mode, const StartDistribution& start,
                      const Limits& limits) {
    switch (mode) {
        case CostMode::nominal: return kernel_value(inst.nominal_kernel(), inst, policy, start).j_cost;
        case CostMode::robust_sup:
            return brute_force_value(inst, policy, Channel::cost_value, Extremum::max, start, limits).value;
        case CostMode::soft_mean: return kernel_value(mean_kernel(inst), inst, policy, start).j_cost;
    }
    throw std::invalid_argument("unknown cost mode");
}

PolicySearchResult brute_force_policy_search(const RCMDPInstance& inst, const ObjectiveSpec& spec, double beta,
                                             const StartDistribution& start, const Limits& limits) {
    std::uint64_t count = 1;
    for (std::size_t s = 0; s < inst.n_states(); ++s) {
        if (count > limits.policy_cap / inst.n_actions()) {
            throw EnumerationCapError("policy enumeration exceeds cap of " + std::to_string(limits.policy_cap));
        }
        count *= inst.n_actions();
    }
    if (count > limits.policy_cap) {
        throw EnumerationCapError("policy enumeration exceeds cap of " + std::to_string(limits.policy_cap));
    }

    std::optional<PolicySearchResult> best_feasible;
    std::optional<PolicySearchResult> least_violating;
    std::vector<std::size_t> actions(inst.n_states(), 0);
    for (std::uint64_t k = 0; k < count; ++k) {
        const Policy policy(actions);
        const double cost = objective_cost(inst, policy, spec.cost_mode, start, limits);
        if (cost <= beta) {
            const double ret = objective_return(inst, policy, spec.return_mode, start, limits);
            if (!best_feasible || ret > best_feasible->best_return) best_feasible = {policy, ret, cost, true};
        } else if (!best_feasible && (!least_violating || cost < least_violating->cost_return)) {
            const double ret = objective_return(inst, policy, spec.return_mode, start, limits);
            least_violating = {policy, ret, cost, false};
        }
        for (std::size_t i = actions.size(); i-- > 0;) {
            if (++actions[i] < inst.n_actions()) break;
            actions[i] = 0;
        }
    }
    return best_feasible ? *best_feasible : *least_violating;
}

}  // namespace rcmdp::oracle
