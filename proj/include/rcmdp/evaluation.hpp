#pragma once

#include "rcmdp/core.hpp"
#include "rcmdp/envs.hpp"
#include "rcmdp/solver.hpp"

#include <string>
#include <vector>

namespace rcmdp {

/// Penalty weight on constraint overshoot used when scoring deployments.
inline constexpr double kDefaultLambdaBar = 1000.0;

struct ExactValues {
    std::vector<double> v_return;
    std::vector<double> v_cost;
};

/// Solves (I - g P_pi) v = r_pi and (I - g P_pi) v_c = c_pi with a dense LU
/// factorization, for one fixed kernel.
ExactValues exact_values(const Kernel& kernel, const RCMDPInstance& inst, const Policy& policy);

struct Returns {
    double j_return = 0.0;
    double j_cost = 0.0;
};

/// Start-weighted exact returns of `policy` under `kernel`.
Returns exact_returns(const Kernel& kernel, const RCMDPInstance& inst, const Policy& policy,
                      const StartDistribution& start);

struct Metrics {
    double overshoot = 0.0;
    double penalized = 0.0;
};

/// overshoot = max(0, J_C - beta); penalized = J_R - lambda_bar * overshoot.
Metrics metrics(double j_return, double j_cost, double beta, double lambda_bar);

struct EvaluationRecord {
    std::string env_label;
    double param_value = 0.0;
    double return_value = 0.0;
    double cost_return = 0.0;
    double overshoot = 0.0;
    double penalized_return = 0.0;
    bool is_nominal = false;

    bool operator==(const EvaluationRecord&) const = default;
};

struct EvaluationReport {
    std::vector<EvaluationRecord> rows;
    double beta = 0.0;
    double lambda_bar = kDefaultLambdaBar;
    double mean_return = 0.0;
    double mean_cost_return = 0.0;
    double mean_overshoot = 0.0;
    double mean_penalized = 0.0;

    bool operator==(const EvaluationReport&) const = default;
};

/// Recomputes the aggregate block as unweighted means of the rows.
void aggregate(EvaluationReport& report);

/// Exact returns and metrics of a fixed policy on every holdout instance.
/// Rows are ordered by parameter value. Throws std::invalid_argument if the
/// holdouts disagree on beta, discount or dimensions.
EvaluationReport holdout_sweep(const Policy& policy, const std::vector<HoldoutInstance>& holdouts,
                               const StartDistribution& start, double lambda_bar,
                               const std::string& env_label = "holdout");

/// Evaluates a fixed policy on one single-kernel instance per grid value; the
/// row whose value equals family.nominal_value is flagged as nominal.
EvaluationReport fixed_policy_sensitivity(const Policy& policy, const PerturbationFamily& family,
                                          const InstanceBuilder& builder, const std::vector<double>& grid,
                                          const StartDistribution& start, double lambda_bar,
                                          const std::string& env_label = "sensitivity");

}  // namespace rcmdp
