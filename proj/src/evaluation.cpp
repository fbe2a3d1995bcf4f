#include "rcmdp/evaluation.hpp"

#include "parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <optional>

namespace rcmdp {

ExactValues exact_values(const Kernel& kernel, const RCMDPInstance& inst, const Policy& policy) {
    policy.check_against(inst);
    const auto n = static_cast<Eigen::Index>(inst.n_states());
    if (kernel.n_states() != inst.n_states() || kernel.n_actions() != inst.n_actions()) {
        throw std::invalid_argument("exact_values: kernel dimensions do not match the instance");
    }
    const double g = inst.discount();

    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd rhs(n, 2);
    for (Eigen::Index s = 0; s < n; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const std::size_t a = policy(su);
        const auto row = kernel.row(su, a);
        for (Eigen::Index t = 0; t < n; ++t) system(s, t) -= g * row[static_cast<std::size_t>(t)];
        rhs(s, 0) = inst.reward()(su, a);
        rhs(s, 1) = inst.cost()(su, a);
    }
    const Eigen::MatrixXd solution = system.partialPivLu().solve(rhs);

    ExactValues out{std::vector<double>(inst.n_states()), std::vector<double>(inst.n_states())};
    for (Eigen::Index s = 0; s < n; ++s) {
        out.v_return[static_cast<std::size_t>(s)] = solution(s, 0);
        out.v_cost[static_cast<std::size_t>(s)] = solution(s, 1);
    }
    return out;
}

Returns exact_returns(const Kernel& kernel, const RCMDPInstance& inst, const Policy& policy,
                      const StartDistribution& start) {
    const ExactValues v = exact_values(kernel, inst, policy);
    return {start.expect(v.v_return), start.expect(v.v_cost)};
}

Metrics metrics(double j_return, double j_cost, double beta, double lambda_bar) {
    if (!(lambda_bar >= 0.0)) throw std::invalid_argument("metrics: lambda_bar must be >= 0");
    const double overshoot = std::max(0.0, j_cost - beta);
    return {overshoot, j_return - lambda_bar * overshoot};
}

void aggregate(EvaluationReport& report) {
    const auto mean = [&](auto field) {
        if (report.rows.empty()) return 0.0;
        double acc = 0.0;
        for (const auto& r : report.rows) acc += r.*field;
        return acc / static_cast<double>(report.rows.size());
    };
    report.mean_return = mean(&EvaluationRecord::return_value);
    report.mean_cost_return = mean(&EvaluationRecord::cost_return);
    report.mean_overshoot = mean(&EvaluationRecord::overshoot);
    report.mean_penalized = mean(&EvaluationRecord::penalized_return);
}

namespace {

EvaluationRecord evaluate_row(const Policy& policy, const RCMDPInstance& inst, double param,
                              const StartDistribution& start, double lambda_bar, const std::string& label) {
    const Returns r = exact_returns(inst.nominal_kernel(), inst, policy, start);
    const Metrics m = metrics(r.j_return, r.j_cost, inst.threshold_beta(), lambda_bar);
    return {label, param, r.j_return, r.j_cost, m.overshoot, m.penalized, false};
}

// Evaluates every instance (possibly in parallel) and returns rows ordered by
// parameter value; equal values keep input order.
std::vector<EvaluationRecord> evaluate_all(const Policy& policy, const std::vector<const RCMDPInstance*>& instances,
                                           const std::vector<double>& params, const StartDistribution& start,
                                           double lambda_bar, const std::string& label) {
    std::vector<std::optional<EvaluationRecord>> rows(instances.size());
    detail::for_each_index(instances.size(), Exec::parallel, [&](std::size_t i) {
        rows[i] = evaluate_row(policy, *instances[i], params[i], start, lambda_bar, label);
    });
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return params[a] < params[b]; });
    std::vector<EvaluationRecord> out;
    out.reserve(rows.size());
    for (std::size_t i : order) out.push_back(*rows[i]);
    return out;
}

}  // namespace

EvaluationReport holdout_sweep(const Policy& policy, const std::vector<HoldoutInstance>& holdouts,
                               const StartDistribution& start, double lambda_bar, const std::string& env_label) {
    if (holdouts.empty()) throw std::invalid_argument("holdout_sweep: no holdout instances");
    if (!(lambda_bar >= 0.0)) throw std::invalid_argument("holdout_sweep: lambda_bar must be >= 0");
    const RCMDPInstance& first = holdouts.front().instance;
    std::vector<const RCMDPInstance*> instances;
    std::vector<double> params;
    for (const auto& h : holdouts) {
        const RCMDPInstance& inst = h.instance;
        if (inst.n_states() != first.n_states() || inst.n_actions() != first.n_actions() ||
            inst.discount() != first.discount() || inst.threshold_beta() != first.threshold_beta()) {
            throw std::invalid_argument("holdout_sweep: holdout instances disagree on beta, discount or dimensions");
        }
        instances.push_back(&inst);
        params.push_back(h.param_value);
    }
    policy.check_against(first);

    EvaluationReport report;
    report.beta = first.threshold_beta();
    report.lambda_bar = lambda_bar;
    report.rows = evaluate_all(policy, instances, params, start, lambda_bar, env_label);
    aggregate(report);
    return report;
}

EvaluationReport fixed_policy_sensitivity(const Policy& policy, const PerturbationFamily& family,
                                          const InstanceBuilder& builder, const std::vector<double>& grid,
                                          const StartDistribution& start, double lambda_bar,
                                          const std::string& env_label) {
    if (grid.empty()) throw std::invalid_argument("fixed_policy_sensitivity: empty grid");
    std::vector<HoldoutInstance> built;
    built.reserve(grid.size());
    for (double x : grid) built.push_back({x, builder(x)});

    EvaluationReport report = holdout_sweep(policy, built, start, lambda_bar, env_label);
    for (auto& row : report.rows) row.is_nominal = row.param_value == family.nominal_value;
    return report;
}

}  // namespace rcmdp
