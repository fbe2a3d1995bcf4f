#include "rcmdp/envs.hpp"
#include "rcmdp/evaluation.hpp"
#include "rcmdp/oracle.hpp"
#include "rcmdp/solver.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

using namespace rcmdp;

namespace {

double always_advance_return(std::size_t n, double slip) {
    const auto inst = make_chain(n, slip, 0.5);
    return exact_returns(inst.nominal_kernel(), inst, Policy::constant(n, kAdvance), StartDistribution::point_mass(n, 0))
        .j_return;
}

// Moves right until the goal column, then down to the goal row (or up).
Policy shortest_path_policy(const GridConfig& g) {
    std::vector<std::size_t> actions(g.width * g.height, kUp);
    for (std::size_t y = 0; y < g.height; ++y) {
        for (std::size_t x = 0; x < g.width; ++x) {
            std::size_t a;
            if (x < g.goal.x) a = kRight;
            else if (x > g.goal.x) a = kLeft;
            else if (y > g.goal.y) a = kDown;
            else a = kUp;
            actions[cell_index(g, {x, y})] = a;
        }
    }
    return Policy(actions);
}

}  // namespace

TEST(Chain, DeterministicClosedForm) {
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
        EXPECT_NEAR(always_advance_return(n, 0.0), std::pow(0.9, n - 1) / (1 - 0.9), 1e-12) << "n=" << n;
    }
}

TEST(Chain, HighSlipReturnOrdering) {
    EXPECT_LT(always_advance_return(5, 0.99), always_advance_return(5, 0.0));
    EXPECT_LT(always_advance_return(5, 0.99), 0.5);
}

TEST(Chain, HazardsAreLastTwoNonTerminal) {
    const auto inst = make_chain(6, 0.1, 0.7);
    for (std::size_t s = 0; s < 6; ++s) {
        const double expected = (s == 3 || s == 4) ? 0.7 : 0.0;
        EXPECT_EQ(inst.cost()(s, kAdvance), expected);
        EXPECT_EQ(inst.cost()(s, kStay), expected);
    }
    EXPECT_EQ(inst.nominal_kernel()(2, kAdvance, 3), 0.9);
    EXPECT_EQ(inst.nominal_kernel()(2, kAdvance, 2), 0.1);
    EXPECT_EQ(inst.nominal_kernel()(2, kStay, 2), 1.0);
    EXPECT_THROW(make_chain(1, 0.0, 0.5), std::invalid_argument);
    EXPECT_THROW(make_chain(4, 1.0, 0.5), std::invalid_argument);
}

TEST(Chain, SuiteCostMonotoneInSlip) {
    for (const char* name : {"chain_short", "chain_long"}) {
        const auto task = fixtures::load_task(name);
        const auto built = build_task(task);
        const auto start = StartDistribution::point_mass(built.train.n_states(), task_start_state(task));
        const Policy advance = Policy::constant(built.train.n_states(), kAdvance);
        double prev = -1.0;
        for (const auto& h : built.holdouts) {
            const double jc = exact_returns(h.instance.nominal_kernel(), h.instance, advance, start).j_cost;
            EXPECT_GE(jc, prev) << name << " slip " << h.param_value;
            prev = jc;
        }
    }
}

TEST(Grid, ShortestPathClosedForm) {
    GridConfig g;
    g.width = 4;
    g.height = 3;
    g.goal = {3, 1};
    const auto inst = make_gridworld(g, 0.0, 1.0);
    const auto values = exact_values(inst.nominal_kernel(), inst, shortest_path_policy(g)).v_return;
    for (std::size_t y = 0; y < g.height; ++y) {
        for (std::size_t x = 0; x < g.width; ++x) {
            const double d = std::abs(int(x) - int(g.goal.x)) + std::abs(int(y) - int(g.goal.y));
            EXPECT_NEAR(values[cell_index(g, {x, y})], std::pow(0.9, d) / (1 - 0.9), 1e-12);
        }
    }
}

TEST(Grid, ZeroSlipRowsAreUnitVectors) {
    const auto task = fixtures::load_task("grid_wall");
    const auto inst = make_gridworld(std::get<GridConfig>(task.env), 0.0, 1.0);
    const auto& k = inst.nominal_kernel();
    for (std::size_t s = 0; s < inst.n_states(); ++s) {
        for (std::size_t a = 0; a < 4; ++a) {
            const auto row = k.row(s, a);
            EXPECT_EQ(std::count(row.begin(), row.end(), 1.0), 1);
            EXPECT_EQ(std::count(row.begin(), row.end(), 0.0), static_cast<long>(row.size()) - 1);
        }
    }
}

TEST(Grid, SlipSplitsToPerpendicularMoves) {
    GridConfig g;
    g.width = 3;
    g.height = 3;
    g.goal = {2, 2};
    const auto inst = make_gridworld(g, 0.2, 1.0);
    const auto& k = inst.nominal_kernel();
    const std::size_t centre = cell_index(g, {1, 1});
    EXPECT_NEAR(k(centre, kUp, cell_index(g, {1, 2})), 0.8, 1e-15);
    EXPECT_NEAR(k(centre, kUp, cell_index(g, {2, 1})), 0.1, 1e-15);
    EXPECT_NEAR(k(centre, kUp, cell_index(g, {0, 1})), 0.1, 1e-15);
    // Bottom-left corner moving left: the wall keeps the agent in place, a slip goes up or stays.
    const std::size_t corner = cell_index(g, {0, 0});
    EXPECT_NEAR(k(corner, kLeft, corner), 0.9, 1e-15);
    EXPECT_NEAR(k(corner, kLeft, cell_index(g, {0, 1})), 0.1, 1e-15);
}

TEST(Grid, ConstrainedSolveDetoursAroundHazard) {
    GridConfig g;
    g.width = 3;
    g.height = 3;
    g.start = {0, 0};
    g.goal = {2, 0};
    g.hazards = {{1, 0}};
    const auto inst = make_gridworld(g, 0.0, 1.0, 0.9, 0.05);
    const std::size_t hazard = cell_index(g, {1, 0});
    const auto start = StartDistribution::point_mass(inst.n_states(), cell_index(g, g.start));

    const auto oracle = oracle::brute_force_policy_search(inst, preset_objective(Preset::C), 0.05, start);
    ASSERT_TRUE(oracle.feasible);
    EXPECT_NEAR(oracle.best_return, std::pow(0.9, 4) / 0.1, 1e-9);

    const auto report = solve(inst, preset_objective(Preset::C), start, LagrangeState(0.0, 0.1, 1000));
    EXPECT_TRUE(report.feasible);
    EXPECT_NEAR(report.return_value, oracle.best_return, 1e-8);
    // Following the policy from the start never enters the hazard cell.
    std::size_t s = cell_index(g, g.start);
    for (int step = 0; step < 10; ++step) {
        EXPECT_NE(s, hazard);
        const auto row = inst.nominal_kernel().row(s, report.policy(s));
        s = static_cast<std::size_t>(std::find(row.begin(), row.end(), 1.0) - row.begin());
    }
}

TEST(Grid, RejectsInvalidLayouts) {
    GridConfig g;
    g.width = 1;
    EXPECT_THROW(make_gridworld(g, 0.0, 1.0), std::invalid_argument);
    g = GridConfig{};
    g.hazards = {{4, 0}};
    EXPECT_THROW(make_gridworld(g, 0.0, 1.0), std::invalid_argument);
    g.hazards = {{9, 9}};
    EXPECT_THROW(make_gridworld(g, 0.0, 1.0), std::invalid_argument);
}

TEST(Family, Validation) {
    PerturbationFamily f{"slip", "slip_probability", 0.05, {0.05, 0.15}, {0.3}};
    EXPECT_TRUE(validate_family(f).empty());
    f.training_values = {0.15};
    EXPECT_FALSE(validate_family(f).empty());
    f.training_values = {0.05};
    f.holdout_values = {};
    EXPECT_FALSE(validate_family(f).empty());
    f.holdout_values = {0.05};
    EXPECT_FALSE(validate_family(f).empty());
}

TEST(BuildTask, Cardinalities) {
    const auto task = fixtures::load_task("grid_cliff");
    const auto built = build_task(task);
    EXPECT_EQ(built.train.uncertainty().size(), 3u);
    EXPECT_EQ(built.holdouts.size(), 9u);
    const auto builder = task_builder(task);
    EXPECT_EQ(built.train.nominal_kernel(), builder(0.05).nominal_kernel());
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(built.train.uncertainty().members[i], builder(task.perturbation.training_values[i]).nominal_kernel());
    }
    for (const auto& h : built.holdouts) {
        EXPECT_EQ(h.instance.uncertainty().size(), 1u);
        EXPECT_EQ(h.instance.reward(), built.train.reward());
        EXPECT_EQ(h.instance.cost(), built.train.cost());
        EXPECT_EQ(h.instance.discount(), built.train.discount());
        EXPECT_EQ(h.instance.threshold_beta(), built.train.threshold_beta());
    }
}

TEST(BuildTask, NominalIndexFollowsNominalValue) {
    auto task = fixtures::load_task("chain_short");
    task.perturbation.training_values = {0.25, 0.15, 0.05};
    const auto built = build_task(task);
    EXPECT_EQ(built.train.nominal_index(), 2u);
}

TEST(BuildTask, Pure) {
    const auto task = fixtures::load_task("grid_bridge");
    const auto a = build_task(task);
    const auto b = build_task(task);
    EXPECT_EQ(a.train, b.train);
    ASSERT_EQ(a.holdouts.size(), b.holdouts.size());
    for (std::size_t i = 0; i < a.holdouts.size(); ++i) EXPECT_EQ(a.holdouts[i].instance, b.holdouts[i].instance);
}

TEST(BuildTask, RejectsMalformedTask) {
    auto task = fixtures::load_task("chain_short");
    task.perturbation.holdout_values.push_back(0.15);
    EXPECT_THROW(build_task(task), std::invalid_argument);
    task = fixtures::load_task("chain_short");
    task.cost_intensity = 1.5;
    EXPECT_THROW(build_task(task), std::invalid_argument);
}

TEST(Suite, HasSixTasks) {
    std::size_t chains = 0, grids = 0;
    for (const auto& name : fixtures::default_suite()) {
        const auto task = fixtures::load_task(name);
        EXPECT_EQ(task.env_name, name);
        (std::holds_alternative<ChainConfig>(task.env) ? chains : grids) += 1;
        EXPECT_NO_THROW(build_task(task));
    }
    EXPECT_EQ(chains, 2u);
    EXPECT_EQ(grids, 4u);
}

TEST(Suite, DefaultsMatchShippedFiles) {
    const auto grid = io::task_to_json(default_grid_task());
    const auto chain = io::task_to_json(default_chain_task());
    EXPECT_EQ(grid["task"], io::read_json(std::string(fixtures::tasks_dir()) + "/grid_cliff.task")["task"]);
    EXPECT_EQ(chain["task"], io::read_json(std::string(fixtures::tasks_dir()) + "/chain_short.task")["task"]);
}
