#include "rcmdp/evaluation.hpp"
#include "rcmdp/operators.hpp"
#include "rcmdp/random.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace rcmdp;
using rcmdp::fixtures::deterministic_instance;

TEST(ExactReturns, AbsorbingGeometricSeries) {
    const auto inst = deterministic_instance({{1.0}}, {{0.0}}, {{0}}, 0.9);
    const auto r = exact_returns(inst.nominal_kernel(), inst, Policy::constant(1, 0), StartDistribution({1.0}));
    EXPECT_NEAR(r.j_return, 10.0, 1e-12);
    EXPECT_EQ(r.j_cost, 0.0);
}

TEST(ExactReturns, Alternator) {
    const auto inst = deterministic_instance({{1.0}, {0.0}}, {{0.0}, {0.0}}, {{1}, {0}}, 0.5);
    const auto r = exact_returns(inst.nominal_kernel(), inst, Policy::constant(2, 0),
                                 StartDistribution::point_mass(2, 0));
    EXPECT_NEAR(r.j_return, 4.0 / 3.0, 1e-14);
}

TEST(ExactReturns, MatchesIterativeOnSingleMember) {
    Rng rng(404);
    for (int i = 0; i < 100; ++i) {
        const auto inst = random_instance(rng, {5, 3, 1, 0.95, 0.4});
        const auto pi = random_policy(rng, 5, 3);
        const auto exact = exact_values(inst.nominal_kernel(), inst, pi);
        const auto iter = policy_evaluation(inst, pi, preset_objective(Preset::C), {1e-12, 100000, Exec::serial});
        EXPECT_LE(sup_norm_diff(exact.v_return, iter.values.v_return), 1e-9);
        EXPECT_LE(sup_norm_diff(exact.v_cost, iter.values.v_cost), 1e-9);
    }
}

// Rectangular sup dominates every single stationary member.
TEST(ExactReturns, SupDominatesEveryMember) {
    Rng rng(405);
    for (int i = 0; i < 50; ++i) {
        const auto inst = random_instance(rng, {4, 2, 3, 0.9, 0.3});
        const auto pi = random_policy(rng, 4, 2);
        const auto start = StartDistribution::point_mass(4, 0);
        const double sup = start.expect(
            policy_evaluation(inst, pi, preset_objective(Preset::R3C), {1e-12, 100000, Exec::serial}).values.v_cost);
        double best_member = 0.0;
        for (const auto& k : inst.uncertainty().members) {
            best_member = std::max(best_member, exact_returns(k, inst, pi, start).j_cost);
        }
        EXPECT_GE(sup, best_member - 1e-9);
    }
}

TEST(Metrics, HandComputedVectors) {
    const auto m = metrics(700.0, 0.2, 0.115, 1000.0);
    EXPECT_NEAR(m.overshoot, 0.085, 1e-15);
    EXPECT_NEAR(m.penalized, 615.0, 1e-10);
    EXPECT_EQ(m.overshoot, 0.2 - 0.115);
    EXPECT_EQ(m.penalized, 700.0 - 1000.0 * (0.2 - 0.115));

    const auto clipped = metrics(3.5, 0.1, 0.115, 1000.0);
    EXPECT_EQ(clipped.overshoot, 0.0);
    EXPECT_EQ(clipped.penalized, 3.5);

    const auto off = metrics(3.5, 9.0, 0.115, 0.0);
    EXPECT_EQ(off.penalized, 3.5);
    EXPECT_THROW(metrics(1, 1, 1, -1), std::invalid_argument);
}

TEST(HoldoutSweep, IdentityOnNominal) {
    const auto task = fixtures::load_task("grid_cliff");
    const auto built = build_task(task);
    const auto start = StartDistribution::point_mass(built.train.n_states(), task_start_state(task));
    const Policy pi = Policy::constant(built.train.n_states(), kRight);
    const auto nominal = task_builder(task)(task.perturbation.nominal_value);
    const auto report = holdout_sweep(pi, {{task.perturbation.nominal_value, nominal}}, start, 1000.0);
    ASSERT_EQ(report.rows.size(), 1u);
    const auto r = exact_returns(nominal.nominal_kernel(), nominal, pi, start);
    EXPECT_EQ(report.rows[0].return_value, r.j_return);
    EXPECT_EQ(report.rows[0].cost_return, r.j_cost);
    EXPECT_EQ(report.mean_return, r.j_return);
}

TEST(HoldoutSweep, RowsOrderedAndAggregated) {
    const auto task = fixtures::load_task("chain_long");
    auto built = build_task(task);
    std::reverse(built.holdouts.begin(), built.holdouts.end());
    const auto start = StartDistribution::point_mass(built.train.n_states(), 0);
    const auto report = holdout_sweep(Policy::constant(built.train.n_states(), kAdvance), built.holdouts, start, 1000.0);
    ASSERT_EQ(report.rows.size(), 9u);
    double sr = 0, sc = 0, so = 0, sp = 0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        if (i > 0) EXPECT_LT(report.rows[i - 1].param_value, row.param_value);
        EXPECT_EQ(row.overshoot, std::max(0.0, row.cost_return - report.beta));
        EXPECT_EQ(row.penalized_return, row.return_value - 1000.0 * row.overshoot);
        sr += row.return_value;
        sc += row.cost_return;
        so += row.overshoot;
        sp += row.penalized_return;
    }
    EXPECT_EQ(report.mean_return, sr / 9.0);
    EXPECT_EQ(report.mean_cost_return, sc / 9.0);
    EXPECT_EQ(report.mean_overshoot, so / 9.0);
    EXPECT_EQ(report.mean_penalized, sp / 9.0);
}

TEST(HoldoutSweep, SafePolicyHasNoOvershoot) {
    const auto task = fixtures::load_task("chain_short");
    const auto built = build_task(task);
    const auto start = StartDistribution::point_mass(built.train.n_states(), 0);
    const auto report = holdout_sweep(Policy::constant(built.train.n_states(), kStay), built.holdouts, start, 1000.0);
    for (const auto& row : report.rows) {
        EXPECT_EQ(row.overshoot, 0.0);
        EXPECT_EQ(row.penalized_return, row.return_value);
    }
}

TEST(HoldoutSweep, RejectsHeterogeneousSet) {
    const auto a = make_chain(4, 0.1, 0.5, 0.9, 0.2);
    const auto b = make_chain(4, 0.2, 0.5, 0.9, 0.3);
    const auto c = make_chain(5, 0.2, 0.5, 0.9, 0.2);
    const auto start = StartDistribution::point_mass(4, 0);
    const Policy pi = Policy::constant(4, 0);
    EXPECT_THROW(holdout_sweep(pi, {{0.1, a}, {0.2, b}}, start, 1000), std::invalid_argument);
    EXPECT_THROW(holdout_sweep(pi, {{0.1, a}, {0.2, c}}, start, 1000), std::invalid_argument);
    EXPECT_THROW(holdout_sweep(pi, {}, start, 1000), std::invalid_argument);
}

TEST(Sensitivity, NominalOnlyGrid) {
    const auto task = fixtures::load_task("chain_short");
    const auto start = StartDistribution::point_mass(5, 0);
    const Policy pi = Policy::constant(5, kAdvance);
    const auto report =
        fixed_policy_sensitivity(pi, task.perturbation, task_builder(task), {0.05}, start, 1000.0);
    ASSERT_EQ(report.rows.size(), 1u);
    EXPECT_TRUE(report.rows[0].is_nominal);
    const auto nominal = task_builder(task)(0.05);
    EXPECT_EQ(report.rows[0].return_value, exact_returns(nominal.nominal_kernel(), nominal, pi, start).j_return);
    EXPECT_THROW(fixed_policy_sensitivity(pi, task.perturbation, task_builder(task), {}, start, 1000.0),
                 std::invalid_argument);
}

TEST(Sensitivity, ZeroCostMeansZeroOvershoot) {
    auto task = fixtures::load_task("grid_cliff");
    task.cost_intensity = 0.0;
    const auto start = StartDistribution::point_mass(15, 0);
    const auto report = fixed_policy_sensitivity(Policy::constant(15, kRight), task.perturbation, task_builder(task),
                                                 {0.0, 0.2, 0.4, 0.6, 0.8}, start, 1000.0);
    for (const auto& row : report.rows) EXPECT_EQ(row.overshoot, 0.0);
}

TEST(Sensitivity, ChainOvershootNonDecreasing) {
    const auto task = fixtures::load_task("chain_short");
    const auto built = build_task(task);
    const auto start = StartDistribution::point_mass(5, 0);
    const auto c = solve(built.train, preset_objective(Preset::C), start, LagrangeState(0.0, 0.1, 1000));
    std::vector<double> grid;
    for (int i = 0; i <= 12; ++i) grid.push_back(0.05 * i);
    const auto report = fixed_policy_sensitivity(c.policy, task.perturbation, task_builder(task), grid, start, 1000.0);
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        EXPECT_GE(report.rows[i].overshoot, report.rows[i - 1].overshoot) << "slip " << report.rows[i].param_value;
    }
}
