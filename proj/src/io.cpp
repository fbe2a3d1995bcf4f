#include "rcmdp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rcmdp::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

template <class T>
T get_field(const Json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

void check_version(const Json& doc) {
    if (doc.is_object() && doc.contains("format_version")) {
        const int v = get_field<int>(doc, "format_version");
        if (v != kFormatVersion) throw FormatError("unsupported format_version " + std::to_string(v));
    }
}

Json table_to_json(const StateActionTable& t) {
    Json rows = Json::array();
    for (std::size_t s = 0; s < t.n_states(); ++s) {
        Json row = Json::array();
        for (std::size_t a = 0; a < t.n_actions(); ++a) row.push_back(t(s, a));
        rows.push_back(std::move(row));
    }
    return rows;
}

StateActionTable table_from_json(const Json& j, const char* name) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw FormatError(std::string("field '") + name + "' must be a non-empty 2-D array");
    }
    const std::size_t n_states = j.size();
    const std::size_t n_actions = j.front().size();
    StateActionTable t(n_states, n_actions);
    for (std::size_t s = 0; s < n_states; ++s) {
        if (!j[s].is_array() || j[s].size() != n_actions) {
            throw FormatError(std::string("field '") + name + "' is ragged at row " + std::to_string(s));
        }
        for (std::size_t a = 0; a < n_actions; ++a) {
            if (!j[s][a].is_number()) throw FormatError(std::string("field '") + name + "' holds a non-number");
            t(s, a) = j[s][a].get<double>();
        }
    }
    return t;
}

}  // namespace

Json instance_to_json(const RCMDPInstance& inst) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["n_states"] = inst.n_states();
    doc["n_actions"] = inst.n_actions();
    doc["discount"] = inst.discount();
    doc["beta"] = inst.threshold_beta();
    doc["nominal_index"] = inst.nominal_index();
    doc["reward"] = table_to_json(inst.reward());
    doc["cost"] = table_to_json(inst.cost());
    Json kernels = Json::array();
    for (const Kernel& k : inst.uncertainty().members) {
        Json member = Json::array();
        for (std::size_t s = 0; s < k.n_states(); ++s) {
            Json per_action = Json::array();
            for (std::size_t a = 0; a < k.n_actions(); ++a) {
                const auto row = k.row(s, a);
                per_action.push_back(Json(std::vector<double>(row.begin(), row.end())));
            }
            member.push_back(std::move(per_action));
        }
        kernels.push_back(std::move(member));
    }
    doc["kernels"] = std::move(kernels);
    return doc;
}

static InstanceData parse_instance_data_from_json(const Json& doc) {
    check_version(doc);
    InstanceData d;
    d.n_states = get_field<std::size_t>(doc, "n_states");
    d.n_actions = get_field<std::size_t>(doc, "n_actions");
    d.discount = get_field<double>(doc, "discount");
    d.threshold_beta = get_field<double>(doc, "beta");
    d.nominal_index = get_field<std::size_t>(doc, "nominal_index");
    d.reward = table_from_json(doc.at("reward"), "reward");
    d.cost = table_from_json(doc.at("cost"), "cost");

    const Json& kernels = doc.at("kernels");
    if (!kernels.is_array()) throw FormatError("field 'kernels' must be an array");
    for (const Json& member : kernels) {
        if (!member.is_array() || member.size() != d.n_states) {
            throw FormatError("kernel member must have n_states entries");
        }
        Kernel k(d.n_states, d.n_actions);
        for (std::size_t s = 0; s < d.n_states; ++s) {
            if (!member[s].is_array() || member[s].size() != d.n_actions) {
                throw FormatError("kernel member must have n_actions rows per state");
            }
            for (std::size_t a = 0; a < d.n_actions; ++a) {
                const Json& row = member[s][a];
                if (!row.is_array() || row.size() != d.n_states) {
                    throw FormatError("kernel row must have n_states probabilities");
                }
                for (std::size_t t = 0; t < d.n_states; ++t) {
                    if (!row[t].is_number()) throw FormatError("kernel row holds a non-number");
                    k(s, a, t) = row[t].get<double>();
                }
            }
        }
        d.uncertainty.members.push_back(std::move(k));
    }
    return d;
}

RCMDPInstance instance_from_json(const Json& doc) { return RCMDPInstance(instance_data_from_json(doc)); }

Json task_to_json(const TaskDefinition& task) {
    Json env;
    if (const auto* chain = std::get_if<ChainConfig>(&task.env)) {
        env["type"] = "chain";
        env["n_states"] = chain->n_states;
    } else {
        const auto& g = std::get<GridConfig>(task.env);
        env["type"] = "gridworld";
        env["width"] = g.width;
        env["height"] = g.height;
        env["start"] = {g.start.x, g.start.y};
        env["goal"] = {g.goal.x, g.goal.y};
        Json hazards = Json::array();
        for (const Cell& c : g.hazards) hazards.push_back({c.x, c.y});
        env["hazards"] = std::move(hazards);
    }

    Json t;
    t["name"] = task.env_name;
    t["env"] = std::move(env);
    t["family"] = task.perturbation.family_name;
    t["parameter"] = task.perturbation.parameter_name;
    t["nominal"] = task.perturbation.nominal_value;
    t["training"] = task.perturbation.training_values;
    t["holdout"] = task.perturbation.holdout_values;
    t["constraint"] = task.constraint_name;
    t["beta"] = task.threshold_beta;
    t["cost_intensity"] = task.cost_intensity;
    t["discount"] = task.discount;

    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["task"] = std::move(t);
    return doc;
}

namespace {

Cell cell_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
        throw FormatError(std::string(what) + " must be an [x, y] pair of non-negative integers");
    }
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

}  // namespace

static TaskDefinition parse_task_from_json(const Json& doc) {
    check_version(doc);
    if (!doc.is_object() || !doc.contains("task")) throw FormatError("missing 'task' document");
    const Json& t = doc.at("task");

    TaskDefinition task;
    task.env_name = get_field<std::string>(t, "name");
    const Json& env = t.at("env");
    const auto type = get_field<std::string>(env, "type");
    if (type == "chain") {
        task.env = ChainConfig{get_field<std::size_t>(env, "n_states")};
    } else if (type == "gridworld") {
        GridConfig g;
        g.width = get_field<std::size_t>(env, "width");
        g.height = get_field<std::size_t>(env, "height");
        g.start = cell_from_json(env.at("start"), "start");
        g.goal = cell_from_json(env.at("goal"), "goal");
        for (const Json& h : env.at("hazards")) g.hazards.push_back(cell_from_json(h, "hazard"));
        task.env = std::move(g);
    } else {
        throw FormatError("unknown env type '" + type + "' (expected chain or gridworld)");
    }
    task.perturbation.family_name = get_field<std::string>(t, "family");
    task.perturbation.parameter_name = t.value("parameter", task.perturbation.family_name);
    task.perturbation.nominal_value = get_field<double>(t, "nominal");
    task.perturbation.training_values = get_field<std::vector<double>>(t, "training");
    task.perturbation.holdout_values = get_field<std::vector<double>>(t, "holdout");
    task.constraint_name = t.value("constraint", std::string("hazard_occupancy"));
    task.threshold_beta = get_field<double>(t, "beta");
    task.cost_intensity = get_field<double>(t, "cost_intensity");
    task.discount = t.contains("discount") ? get_field<double>(t, "discount") : 0.9;
    return task;
}

Json policy_to_json(const Policy& policy, std::size_t n_actions) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["n_states"] = policy.size();
    doc["n_actions"] = n_actions;
    doc["actions"] = policy.actions();
    return doc;
}

static Policy parse_policy_from_json(const Json& doc) {
    check_version(doc);
    const auto n_states = get_field<std::size_t>(doc, "n_states");
    const auto n_actions = get_field<std::size_t>(doc, "n_actions");
    auto actions = get_field<std::vector<std::size_t>>(doc, "actions");
    if (actions.size() != n_states) throw FormatError("policy 'actions' length differs from n_states");
    for (std::size_t a : actions) {
        if (a >= n_actions) throw FormatError("policy action out of range");
    }
    return Policy(std::move(actions));
}

Json report_to_json(const EvaluationReport& report) {
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        Json row;
        row["env_label"] = r.env_label;
        row["param_value"] = r.param_value;
        row["return"] = r.return_value;
        row["cost_return"] = r.cost_return;
        row["overshoot"] = r.overshoot;
        row["penalized_return"] = r.penalized_return;
        row["is_nominal"] = r.is_nominal;
        rows.push_back(std::move(row));
    }
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["beta"] = report.beta;
    doc["lambda_bar"] = report.lambda_bar;
    doc["rows"] = std::move(rows);
    doc["aggregate"] = {{"mean_return", report.mean_return},
                        {"mean_cost_return", report.mean_cost_return},
                        {"mean_overshoot", report.mean_overshoot},
                        {"mean_penalized_return", report.mean_penalized}};
    return doc;
}

static EvaluationReport parse_report_from_json(const Json& doc) {
    check_version(doc);
    EvaluationReport report;
    report.beta = get_field<double>(doc, "beta");
    report.lambda_bar = get_field<double>(doc, "lambda_bar");
    for (const Json& row : doc.at("rows")) {
        report.rows.push_back({get_field<std::string>(row, "env_label"), get_field<double>(row, "param_value"),
                               get_field<double>(row, "return"), get_field<double>(row, "cost_return"),
                               get_field<double>(row, "overshoot"), get_field<double>(row, "penalized_return"),
                               row.value("is_nominal", false)});
    }
    const Json& agg = doc.at("aggregate");
    report.mean_return = get_field<double>(agg, "mean_return");
    report.mean_cost_return = get_field<double>(agg, "mean_cost_return");
    report.mean_overshoot = get_field<double>(agg, "mean_overshoot");
    report.mean_penalized = get_field<double>(agg, "mean_penalized_return");
    return report;
}

std::string report_to_csv(const EvaluationReport& report, bool with_nominal_flag) {
    std::ostringstream os;
    os << "# format_version=" << kFormatVersion << "\n";
    os << "env_label,param_value,return,cost_return,overshoot,penalized_return";
    if (with_nominal_flag) os << ",is_nominal";
    os << "\n";
    for (const auto& r : report.rows) {
        os << r.env_label << ',' << format_double(r.param_value) << ',' << format_double(r.return_value) << ','
           << format_double(r.cost_return) << ',' << format_double(r.overshoot) << ','
           << format_double(r.penalized_return);
        if (with_nominal_flag) os << ',' << (r.is_nominal ? 1 : 0);
        os << "\n";
    }
    return os.str();
}

Json solve_report_to_json(const SolveReport& report) {
    Json history = Json::array();
    for (const auto& rec : report.history) {
        Json h;
        h["iteration"] = rec.iteration;
        h["lambda"] = rec.lambda;
        h["lambda_next"] = rec.lambda_next;
        h["worst_case_cost_return"] = rec.worst_case_cost_return;
        h["return"] = rec.return_value;
        h["policy_changed"] = rec.policy_changed;
        history.push_back(std::move(h));
    }
    Json doc;
    doc["policy"] = report.policy.actions();
    doc["lambda_final"] = report.lambda_final;
    doc["converged"] = report.converged;
    doc["feasible"] = report.feasible;
    doc["iterations_used"] = report.iterations_used;
    doc["return"] = report.return_value;
    doc["worst_case_cost_return"] = report.worst_case_cost_return;
    doc["history"] = std::move(history);
    return doc;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("cannot parse '" + path.string() + "': " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const std::filesystem::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }


namespace {

// Library errors that slip past the explicit checks surface as FormatError.
template <class F>
auto translated(F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
}

}  // namespace

InstanceData instance_data_from_json(const Json& doc) {
    return translated([&] { return parse_instance_data_from_json(doc); });
}

TaskDefinition task_from_json(const Json& doc) {
    return translated([&] { return parse_task_from_json(doc); });
}

Policy policy_from_json(const Json& doc) {
    return translated([&] { return parse_policy_from_json(doc); });
}

EvaluationReport report_from_json(const Json& doc) {
    return translated([&] { return parse_report_from_json(doc); });
}

}  // namespace rcmdp::io
