#include "rcmdp/envs.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace rcmdp {

std::vector<std::string> validate_family(const PerturbationFamily& f) {
    std::vector<std::string> out;
    if (f.training_values.empty()) out.emplace_back("training_values must be non-empty");
    if (f.holdout_values.empty()) out.emplace_back("holdout_values must be non-empty");
    if (std::find(f.training_values.begin(), f.training_values.end(), f.nominal_value) == f.training_values.end()) {
        out.emplace_back("training_values must contain the nominal value");
    }
    for (double h : f.holdout_values) {
        if (std::find(f.training_values.begin(), f.training_values.end(), h) != f.training_values.end()) {
            out.emplace_back("holdout value " + std::to_string(h) + " also appears in training_values");
        }
    }
    return out;
}

namespace {

void check_common(double slip, double cost_intensity, double discount) {
    if (!(slip >= 0.0 && slip < 1.0)) throw std::invalid_argument("slip must lie in [0, 1)");
    if (!(cost_intensity >= 0.0 && cost_intensity <= 1.0)) {
        throw std::invalid_argument("cost_intensity must lie in [0, 1]");
    }
    if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
}

}  // namespace

RCMDPInstance make_chain(std::size_t n_states, double slip, double cost_intensity, double discount, double beta) {
    if (n_states < 2) throw std::invalid_argument("chain needs at least 2 states");
    check_common(slip, cost_intensity, discount);

    const std::size_t terminal = n_states - 1;
    InstanceData d;
    d.n_states = n_states;
    d.n_actions = 2;
    d.discount = discount;
    d.threshold_beta = beta;
    d.reward = StateActionTable(n_states, 2);
    d.cost = StateActionTable(n_states, 2);

    Kernel k(n_states, 2);
    for (std::size_t s = 0; s < n_states; ++s) {
        if (s == terminal) {
            k(s, kAdvance, s) = 1.0;
            k(s, kStay, s) = 1.0;
            d.reward(s, kAdvance) = d.reward(s, kStay) = 1.0;
            continue;
        }
        k(s, kAdvance, s + 1) = 1.0 - slip;
        k(s, kAdvance, s) += slip;
        k(s, kStay, s) = 1.0;
        if (s + 2 >= terminal) d.cost(s, kAdvance) = d.cost(s, kStay) = cost_intensity;
    }
    d.uncertainty.members.push_back(std::move(k));
    return RCMDPInstance(std::move(d));
}

std::size_t cell_index(const GridConfig& grid, Cell c) { return c.y * grid.width + c.x; }

namespace {

void check_grid(const GridConfig& g) {
    if (g.width < 2 || g.height < 2) throw std::invalid_argument("gridworld dimensions must be >= 2");
    auto inside = [&](Cell c) { return c.x < g.width && c.y < g.height; };
    if (!inside(g.start)) throw std::invalid_argument("start cell outside the grid");
    if (!inside(g.goal)) throw std::invalid_argument("goal cell outside the grid");
    if (g.start == g.goal) throw std::invalid_argument("start and goal must differ");
    for (std::size_t i = 0; i < g.hazards.size(); ++i) {
        const Cell h = g.hazards[i];
        if (!inside(h)) throw std::invalid_argument("hazard cell outside the grid");
        if (h == g.goal || h == g.start) throw std::invalid_argument("hazard cell on start or goal");
        for (std::size_t j = 0; j < i; ++j) {
            if (g.hazards[j] == h) throw std::invalid_argument("duplicate hazard cell");
        }
    }
}

Cell moved(const GridConfig& g, Cell c, std::size_t action) {
    switch (action) {
        case kUp: return c.y + 1 < g.height ? Cell{c.x, c.y + 1} : c;
        case kRight: return c.x + 1 < g.width ? Cell{c.x + 1, c.y} : c;
        case kDown: return c.y > 0 ? Cell{c.x, c.y - 1} : c;
        case kLeft: return c.x > 0 ? Cell{c.x - 1, c.y} : c;
    }
    return c;
}

}  // namespace

RCMDPInstance make_gridworld(const GridConfig& grid, double slip, double cost_intensity, double discount,
                             double beta) {
    check_grid(grid);
    check_common(slip, cost_intensity, discount);

    const std::size_t n = grid.width * grid.height;
    const std::size_t goal = cell_index(grid, grid.goal);
    InstanceData d;
    d.n_states = n;
    d.n_actions = 4;
    d.discount = discount;
    d.threshold_beta = beta;
    d.reward = StateActionTable(n, 4);
    d.cost = StateActionTable(n, 4);
    for (const Cell& h : grid.hazards) {
        for (std::size_t a = 0; a < 4; ++a) d.cost(cell_index(grid, h), a) = cost_intensity;
    }

    Kernel k(n, 4);
    for (std::size_t y = 0; y < grid.height; ++y) {
        for (std::size_t x = 0; x < grid.width; ++x) {
            const Cell c{x, y};
            const std::size_t s = cell_index(grid, c);
            for (std::size_t a = 0; a < 4; ++a) {
                if (s == goal) {
                    k(s, a, s) = 1.0;
                    d.reward(s, a) = 1.0;
                    continue;
                }
                // perpendicular moves: (a + 1) % 4 and (a + 3) % 4
                k(s, a, cell_index(grid, moved(grid, c, a))) += 1.0 - slip;
                k(s, a, cell_index(grid, moved(grid, c, (a + 1) % 4))) += 0.5 * slip;
                k(s, a, cell_index(grid, moved(grid, c, (a + 3) % 4))) += 0.5 * slip;
            }
        }
    }
    d.uncertainty.members.push_back(std::move(k));
    return RCMDPInstance(std::move(d));
}

void validate_task(const TaskDefinition& task) {
    auto problems = validate_family(task.perturbation);
    if (!(task.threshold_beta >= 0.0)) problems.emplace_back("threshold_beta must be >= 0");
    if (!(task.cost_intensity >= 0.0 && task.cost_intensity <= 1.0)) {
        problems.emplace_back("cost_intensity must lie in [0, 1]");
    }
    if (!problems.empty()) {
        std::string msg = "invalid task '" + task.env_name + "':";
        for (const auto& p : problems) msg += "\n  " + p;
        throw std::invalid_argument(msg);
    }
}

InstanceBuilder task_builder(const TaskDefinition& task) {
    return std::visit(
        [&](const auto& env) -> InstanceBuilder {
            using T = std::decay_t<decltype(env)>;
            const double ci = task.cost_intensity;
            const double g = task.discount;
            const double beta = task.threshold_beta;
            if constexpr (std::is_same_v<T, ChainConfig>) {
                return [n = env.n_states, ci, g, beta](double slip) { return make_chain(n, slip, ci, g, beta); };
            } else {
                return [grid = env, ci, g, beta](double slip) { return make_gridworld(grid, slip, ci, g, beta); };
            }
        },
        task.env);
}

std::size_t task_start_state(const TaskDefinition& task) {
    if (const auto* grid = std::get_if<GridConfig>(&task.env)) return cell_index(*grid, grid->start);
    return 0;
}

std::vector<std::size_t> task_hazard_states(const TaskDefinition& task) {
    std::vector<std::size_t> out;
    if (const auto* grid = std::get_if<GridConfig>(&task.env)) {
        for (const Cell& h : grid->hazards) out.push_back(cell_index(*grid, h));
    } else {
        const std::size_t terminal = std::get<ChainConfig>(task.env).n_states - 1;
        for (std::size_t s = terminal >= 2 ? terminal - 2 : 0; s < terminal; ++s) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

BuiltTask build_task(const TaskDefinition& task, const InstanceBuilder& builder) {
    validate_task(task);
    const auto& family = task.perturbation;

    UncertaintySet set;
    std::size_t nominal_index = 0;
    std::optional<RCMDPInstance> base;
    for (std::size_t i = 0; i < family.training_values.size(); ++i) {
        RCMDPInstance inst = builder(family.training_values[i]);
        if (family.training_values[i] == family.nominal_value) nominal_index = i;
        set.members.push_back(inst.nominal_kernel());
        if (!base) base.emplace(std::move(inst));
    }
    RCMDPInstance train = base->with_uncertainty(std::move(set), nominal_index);

    std::vector<HoldoutInstance> holdouts;
    for (double h : family.holdout_values) {
        RCMDPInstance inst = builder(h);
        if (inst.reward() != train.reward() || inst.cost() != train.cost() ||
            inst.discount() != train.discount() || inst.threshold_beta() != train.threshold_beta()) {
            throw std::invalid_argument("builder produced a holdout instance with different reward/cost/discount/beta");
        }
        holdouts.push_back({h, std::move(inst)});
    }
    return {std::move(train), std::move(holdouts)};
}

BuiltTask build_task(const TaskDefinition& task) { return build_task(task, task_builder(task)); }

TaskDefinition default_grid_task() {
    TaskDefinition t;
    t.env_name = "grid_cliff";
    GridConfig g;
    g.width = 5;
    g.height = 3;
    g.start = {0, 0};
    g.goal = {4, 0};
    g.hazards = {{1, 0}, {2, 0}, {3, 0}};
    t.env = g;
    t.perturbation = {"slip", "slip_probability", 0.05, {0.05, 0.15, 0.25},
                      {0.0, 0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55}};
    t.constraint_name = "hazard_occupancy";
    t.threshold_beta = 0.2;
    t.cost_intensity = 1.0;
    t.discount = 0.9;
    return t;
}

TaskDefinition default_chain_task() {
    TaskDefinition t;
    t.env_name = "chain_short";
    t.env = ChainConfig{5};
    t.perturbation = {"slip", "slip_probability", 0.05, {0.05, 0.15, 0.25},
                      {0.0, 0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55}};
    t.constraint_name = "hazard_occupancy";
    t.threshold_beta = 1.0;
    t.cost_intensity = 0.6;
    t.discount = 0.9;
    return t;
}

}  // namespace rcmdp
