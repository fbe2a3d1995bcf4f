#include "cli.hpp"

#include "rcmdp/envs.hpp"
#include "rcmdp/evaluation.hpp"
#include "rcmdp/io.hpp"
#include "rcmdp/solver.hpp"
#include "rcmdp/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>

namespace rcmdp::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PropertyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string task_path;
    std::string objective = "R3C";
    std::string out_dir;
    std::string policy_path;
    std::string grid;
    std::string level = "quick";
    std::string env = "gridworld";
    std::uint64_t seed = 0;
    double lambda_init = 0.0;
    double lambda_step = 0.1;
    double lambda_max = 1000.0;
    double lambda_bar = kDefaultLambdaBar;
    double tol = 1e-9;
    double eval_tol = 1e-11;
    std::size_t outer_iters = 2000;
};

struct LoadedTask {
    TaskDefinition definition;
    BuiltTask built;
    StartDistribution start;
};

LoadedTask load_task(const std::string& path) {
    if (path.empty()) throw UsageError("--task is required");
    TaskDefinition def = io::task_from_json(io::read_json(path));
    BuiltTask built = build_task(def);
    StartDistribution start = StartDistribution::point_mass(built.train.n_states(), task_start_state(def));
    return {std::move(def), std::move(built), std::move(start)};
}

Json provenance(const Options& o, const LoadedTask& task) {
    Json doc;
    doc["format_version"] = io::kFormatVersion;
    doc["tool_version"] = io::kToolVersion;
    Json config;
    config["task_file"] = o.task_path;
    config["task"] = io::task_to_json(task.definition)["task"];
    config["start_state"] = task_start_state(task.definition);
    doc["config"] = std::move(config);
    return doc;
}

Policy load_policy(const Options& o, const LoadedTask& task) {
    if (o.policy_path.empty()) throw UsageError("--policy is required");
    Policy policy = io::policy_from_json(io::read_json(o.policy_path));
    policy.check_against(task.built.train);
    return policy;
}

fs::path require_out(const Options& o) {
    if (o.out_dir.empty()) throw UsageError("--out is required");
    return o.out_dir;
}

int cmd_solve(const Options& o, std::ostream& out) {
    const ObjectiveSpec spec = [&] {
        try {
            return preset_objective(o.objective);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    const fs::path dir = require_out(o);
    const LoadedTask task = load_task(o.task_path);

    SolveOptions opts;
    opts.outer_iters = o.outer_iters;
    opts.tol = o.tol;
    opts.inner.evaluation.tol = o.eval_tol;
    const LagrangeState lagrange(o.lambda_init, o.lambda_step, o.lambda_max);
    const SolveReport report = solve(task.built.train, spec, task.start, lagrange, opts);

    Json doc = provenance(o, task);
    auto& config = doc["config"];
    config["objective"] = preset_name(spec.preset);
    config["return_mode"] = mode_name(spec.return_mode);
    config["cost_mode"] = mode_name(spec.cost_mode);
    config["constraint_mode"] = mode_name(constraint_mode(spec));
    config["lambda_init"] = o.lambda_init;
    config["lambda_step"] = o.lambda_step;
    config["lambda_max"] = o.lambda_max;
    config["tol"] = o.tol;
    config["eval_tol"] = o.eval_tol;
    config["outer_iters"] = o.outer_iters;
    config["max_sweeps"] = opts.inner.max_sweeps;

    Json policy_doc = doc;
    const Json policy_json = io::policy_to_json(report.policy, task.built.train.n_actions());
    for (const auto& [k, v] : policy_json.items()) policy_doc[k] = v;
    io::write_json(dir / "policy.json", policy_doc);

    Json report_doc = doc;
    report_doc["solve"] = io::solve_report_to_json(report);
    io::write_json(dir / "solve_report.json", report_doc);

    out << "objective " << preset_name(spec.preset) << ": feasible=" << (report.feasible ? "true" : "false")
        << " return=" << io::format_double(report.return_value)
        << " worst_case_cost_return=" << io::format_double(report.worst_case_cost_return)
        << " lambda_final=" << io::format_double(report.lambda_final) << " iterations=" << report.iterations_used
        << "\n";
    return kSuccess;
}

void write_report(const fs::path& dir, const std::string& stem, Json doc, const EvaluationReport& report,
                  bool nominal_flag) {
    doc["report"] = io::report_to_json(report);
    io::write_json(dir / (stem + ".json"), doc);
    io::write_text(dir / (stem + ".csv"), io::report_to_csv(report, nominal_flag));
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const fs::path dir = require_out(o);
    const LoadedTask task = load_task(o.task_path);
    const Policy policy = load_policy(o, task);
    const EvaluationReport report =
        holdout_sweep(policy, task.built.holdouts, task.start, o.lambda_bar, task.definition.env_name);

    Json doc = provenance(o, task);
    doc["config"]["policy_file"] = o.policy_path;
    doc["config"]["lambda_bar"] = o.lambda_bar;
    write_report(dir, "sweep", std::move(doc), report, false);
    out << "sweep: " << report.rows.size() << " holdout rows, mean overshoot "
        << io::format_double(report.mean_overshoot) << ", mean penalized return "
        << io::format_double(report.mean_penalized) << "\n";
    return kSuccess;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::string item;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            if (!item.empty()) {
                std::size_t used = 0;
                double x = 0.0;
                try {
                    x = std::stod(item, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != item.size()) throw UsageError("--grid entry '" + item + "' is not a number");
                grid.push_back(x);
            }
            item.clear();
        } else if (text[i] != ' ') {
            item += text[i];
        }
    }
    return grid;
}

int cmd_sensitivity(const Options& o, std::ostream& out) {
    const std::vector<double> grid = parse_grid(o.grid);
    if (grid.empty()) throw UsageError("--grid must list at least one parameter value");
    const fs::path dir = require_out(o);
    const LoadedTask task = load_task(o.task_path);
    const Policy policy = load_policy(o, task);
    const EvaluationReport report =
        fixed_policy_sensitivity(policy, task.definition.perturbation, task_builder(task.definition), grid,
                                 task.start, o.lambda_bar, task.definition.env_name);

    Json doc = provenance(o, task);
    doc["config"]["policy_file"] = o.policy_path;
    doc["config"]["lambda_bar"] = o.lambda_bar;
    doc["config"]["grid"] = grid;
    write_report(dir, "sensitivity", std::move(doc), report, true);
    out << "sensitivity: " << report.rows.size() << " grid rows\n";
    return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
    if (o.level != "quick" && o.level != "full") throw UsageError("--level must be quick or full");
    const auto level = o.level == "full" ? verify::Level::full : verify::Level::quick;
    const auto results = verify::run_verification(level, o.seed);

    Json props = Json::array();
    bool all_passed = true;
    for (const auto& r : results) {
        all_passed = all_passed && r.passed;
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " samples=" << r.samples
            << " max_violation=" << io::format_double(r.max_violation)
            << " tolerance=" << io::format_double(r.tolerance);
        if (!r.detail.empty()) out << " (" << r.detail << ")";
        out << "\n";
        props.push_back({{"name", r.name},
                         {"samples", r.samples},
                         {"max_violation", r.max_violation},
                         {"tolerance", r.tolerance},
                         {"passed", r.passed},
                         {"detail", r.detail}});
    }
    if (!o.out_dir.empty()) {
        Json doc;
        doc["format_version"] = io::kFormatVersion;
        doc["tool_version"] = io::kToolVersion;
        doc["config"] = {{"level", o.level}, {"seed", o.seed}};
        doc["passed"] = all_passed;
        doc["properties"] = std::move(props);
        io::write_json(fs::path(o.out_dir) / "verify.json", doc);
    }
    if (!all_passed) throw PropertyFailure("one or more verification properties failed");
    return kSuccess;
}

int cmd_gen_task(const Options& o, std::ostream& out) {
    if (o.out_dir.empty()) throw UsageError("--out is required (path of the task file to write)");
    TaskDefinition task;
    if (o.env == "gridworld" || o.env == "grid") {
        task = default_grid_task();
    } else if (o.env == "chain") {
        task = default_chain_task();
    } else {
        throw UsageError("--env must be gridworld or chain");
    }
    Json doc = io::task_to_json(task);
    doc["tool_version"] = io::kToolVersion;
    io::write_json(o.out_dir, doc);
    out << "wrote " << o.out_dir << "\n";
    return kSuccess;
}

void emit_error(std::ostream& err, const char* kind, const std::string& message, int code) {
    Json doc;
    doc["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
    err << doc.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact solver and verification toolkit for robust constrained MDPs", "rcmdp"};
    app.require_subcommand(1);
    Options o;

    auto add_task = [&](CLI::App* sub) { sub->add_option("--task", o.task_path, "Task definition file"); };
    auto add_out = [&](CLI::App* sub, const char* what) { sub->add_option("--out", o.out_dir, what); };
    auto add_lambda_bar = [&](CLI::App* sub) {
        sub->add_option("--lambda-bar", o.lambda_bar, "Overshoot penalty weight")->capture_default_str();
    };

    auto* solve_cmd = app.add_subcommand("solve", "Solve a task's training instance");
    add_task(solve_cmd);
    add_out(solve_cmd, "Output directory");
    solve_cmd->add_option("--objective", o.objective, "One of C, R, RC, R3C, SR3C")->capture_default_str();
    solve_cmd->add_option("--lambda-init", o.lambda_init)->capture_default_str();
    solve_cmd->add_option("--lambda-step", o.lambda_step)->capture_default_str();
    solve_cmd->add_option("--lambda-max", o.lambda_max)->capture_default_str();
    solve_cmd->add_option("--tol", o.tol, "Multiplier convergence and feasibility tolerance")->capture_default_str();
    solve_cmd->add_option("--eval-tol", o.eval_tol, "Policy evaluation tolerance")->capture_default_str();
    solve_cmd->add_option("--outer-iters", o.outer_iters)->capture_default_str();

    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a policy on the holdout set");
    add_task(sweep_cmd);
    add_out(sweep_cmd, "Output directory");
    sweep_cmd->add_option("--policy", o.policy_path, "Policy file written by solve");
    add_lambda_bar(sweep_cmd);

    auto* sens_cmd = app.add_subcommand("sensitivity", "Evaluate a fixed policy along a parameter grid");
    add_task(sens_cmd);
    add_out(sens_cmd, "Output directory");
    sens_cmd->add_option("--policy", o.policy_path, "Policy file written by solve");
    sens_cmd->add_option("--grid", o.grid, "Comma-separated parameter values");
    add_lambda_bar(sens_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "Run the property and oracle verification suite");
    verify_cmd->add_option("level,--level", o.level, "quick or full")->capture_default_str();
    verify_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    add_out(verify_cmd, "Directory for verify.json");

    auto* gen_cmd = app.add_subcommand("gen-task", "Write a default task file");
    add_out(gen_cmd, "Path of the task file");
    gen_cmd->add_option("--env", o.env, "gridworld or chain")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what(), kUsage);
        return kUsage;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(o, out);
        if (sweep_cmd->parsed()) return cmd_sweep(o, out);
        if (sens_cmd->parsed()) return cmd_sensitivity(o, out);
        if (verify_cmd->parsed()) return cmd_verify(o, out);
        if (gen_cmd->parsed()) return cmd_gen_task(o, out);
    } catch (const UsageError& e) {
        emit_error(err, "usage", e.what(), kUsage);
        return kUsage;
    } catch (const PropertyFailure& e) {
        emit_error(err, "property_failure", e.what(), kPropertyFailure);
        return kPropertyFailure;
    } catch (const std::exception& e) {
        emit_error(err, "data", e.what(), kData);
        return kData;
    }
    emit_error(err, "usage", "no subcommand given", kUsage);
    return kUsage;
}

}  // namespace rcmdp::cli
