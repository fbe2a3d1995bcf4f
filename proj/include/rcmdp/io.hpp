#pragma once

#include "rcmdp/core.hpp"
#include "rcmdp/envs.hpp"
#include "rcmdp/evaluation.hpp"
#include "rcmdp/solver.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace rcmdp::io {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Malformed or unreadable document.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

Json instance_to_json(const RCMDPInstance& inst);
/// Parses the raw fields without validating them.
InstanceData instance_data_from_json(const Json& doc);
/// Parses and validates; InvalidInstanceError on a semantically invalid instance.
RCMDPInstance instance_from_json(const Json& doc);

Json task_to_json(const TaskDefinition& task);
TaskDefinition task_from_json(const Json& doc);

Json policy_to_json(const Policy& policy, std::size_t n_actions);
Policy policy_from_json(const Json& doc);

Json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const Json& doc);
/// Header env_label,param_value,return,cost_return,overshoot,penalized_return,
/// with a trailing is_nominal column when `with_nominal_flag` is set.
std::string report_to_csv(const EvaluationReport& report, bool with_nominal_flag = false);

Json solve_report_to_json(const SolveReport& report);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rcmdp::io
