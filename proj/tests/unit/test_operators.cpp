#include "rcmdp/operators.hpp"
#include "rcmdp/random.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rcmdp;
using rcmdp::fixtures::two_state_instance;

namespace {

// Only the (0, 0) row is filled; sigma_select reads nothing else.
UncertaintySet two_rows(std::vector<double> r1, std::vector<double> r2) {
    UncertaintySet set;
    const std::size_t n = r1.size();
    Kernel k1(n, 1), k2(n, 1);
    for (std::size_t j = 0; j < n; ++j) {
        k1(0, 0, j) = r1[j];
        k2(0, 0, j) = r2[j];
    }
    set.members = {k1, k2};
    return set;
}

const Policy kOnly = Policy::constant(2, 0);

}  // namespace

TEST(SigmaSelect, VertexSelection) {
    const auto set = two_rows({1, 0, 0}, {0, 0, 1});
    const std::vector<double> v{1, 2, 3};
    EXPECT_EQ(sigma_select(v, 0, 0, set, BellmanMode::robust_inf, 0), 1.0);
    EXPECT_EQ(sigma_select(v, 0, 0, set, BellmanMode::robust_sup, 0), 3.0);
    EXPECT_EQ(sigma_select(v, 0, 0, set, BellmanMode::soft_mean, 0), 2.0);
    EXPECT_EQ(sigma_select(v, 0, 0, set, BellmanMode::nominal, 1), 3.0);
}

TEST(SigmaSelect, SingleRowAnyMode) {
    UncertaintySet set;
    Kernel k(3, 1);
    k(0, 0, 0) = 0.5;
    k(0, 0, 1) = 0.5;
    set.members = {k};
    const std::vector<double> v{2, 4, 6};
    for (auto mode : {BellmanMode::nominal, BellmanMode::robust_inf, BellmanMode::robust_sup, BellmanMode::soft_mean}) {
        EXPECT_EQ(sigma_select(v, 0, 0, set, mode, 0), 3.0);
    }
}

TEST(ReturnApply, TwoStateFixedPoints) {
    const auto inst = two_state_instance();
    const std::vector<double> inf_fp{1, 0};
    EXPECT_EQ(bellman_return_apply(inst, kOnly, inf_fp, BellmanMode::robust_inf), inf_fp);
    const std::vector<double> nom_fp{2, 0};
    EXPECT_EQ(bellman_return_apply(inst, kOnly, nom_fp, BellmanMode::nominal), nom_fp);

    auto spec = preset_objective(Preset::R3C);
    auto ev = policy_evaluation(inst, kOnly, spec, {1e-12, 100000, Exec::serial});
    EXPECT_NEAR(ev.values.v_return[0], 1.0, 1e-11);
    EXPECT_NEAR(ev.values.v_return[1], 0.0, 1e-11);
    auto nominal = policy_evaluation(inst, kOnly, preset_objective(Preset::C), {1e-12, 100000, Exec::serial});
    EXPECT_NEAR(nominal.values.v_return[0], 2.0, 1e-11);
}

TEST(ReturnApply, ZeroValueGivesReward) {
    const auto inst = two_state_instance();
    const std::vector<double> zero{0, 0};
    for (auto mode : {BellmanMode::nominal, BellmanMode::robust_inf, BellmanMode::soft_mean}) {
        EXPECT_EQ(bellman_return_apply(inst, kOnly, zero, mode), (std::vector<double>{1, 0}));
        EXPECT_EQ(bellman_cost_apply(inst, kOnly, zero, mode == BellmanMode::robust_inf ? BellmanMode::robust_sup : mode),
                  (std::vector<double>{0, 1}));
    }
}

TEST(ReturnApply, ModeGuards) {
    const auto inst = two_state_instance();
    const std::vector<double> zero{0, 0};
    EXPECT_THROW(bellman_return_apply(inst, kOnly, zero, BellmanMode::robust_sup), std::invalid_argument);
    EXPECT_THROW(bellman_cost_apply(inst, kOnly, zero, BellmanMode::robust_inf), std::invalid_argument);
    EXPECT_THROW(bellman_return_apply(inst, kOnly, std::vector<double>{0}, BellmanMode::nominal), std::invalid_argument);
}

TEST(CostApply, TwoStateSupFixedPoint) {
    const auto inst = two_state_instance();
    const std::vector<double> sup_fp{1, 2};
    EXPECT_EQ(bellman_cost_apply(inst, kOnly, sup_fp, BellmanMode::robust_sup), sup_fp);
    auto ev = policy_evaluation(inst, kOnly, preset_objective(Preset::R3C), {1e-12, 100000, Exec::serial});
    EXPECT_NEAR(ev.values.v_cost[0], 1.0, 1e-11);
    EXPECT_NEAR(ev.values.v_cost[1], 2.0, 1e-11);
}

TEST(CostApply, SingleMemberSupEqualsNominal) {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto inst = random_instance(rng, {4, 3, 1, 0.9, 0.3});
        const auto pi = random_policy(rng, 4, 3);
        const auto v = random_vector(rng, 4, 10.0);
        EXPECT_EQ(bellman_cost_apply(inst, pi, v, BellmanMode::robust_sup),
                  bellman_cost_apply(inst, pi, v, BellmanMode::nominal));
    }
}

TEST(R3CApply, PresetCIsNominalBackup) {
    Rng rng(9);
    const auto inst = random_instance(rng, {5, 2, 3, 0.8, 0.3});
    const auto pi = random_policy(rng, 5, 2);
    const ValuePair pair{random_vector(rng, 5, 3.0), random_vector(rng, 5, 3.0)};
    const auto out = r3c_apply(inst, pi, pair, preset_objective(Preset::C));
    for (std::size_t s = 0; s < 5; ++s) {
        const auto row = inst.nominal_kernel().row(s, pi(s));
        double er = 0.0, ec = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            er += row[j] * pair.v_return[j];
            ec += row[j] * pair.v_cost[j];
        }
        EXPECT_NEAR(out.v_return[s], inst.reward()(s, pi(s)) + 0.8 * er, 1e-14);
        EXPECT_NEAR(out.v_cost[s], inst.cost()(s, pi(s)) + 0.8 * ec, 1e-14);
    }
}

TEST(R3CApply, ComponentsBackedUpIndependently) {
    Rng rng(21);
    const auto inst = random_instance(rng, {4, 2, 3, 0.9, 0.3});
    const auto pi = random_policy(rng, 4, 2);
    const ValuePair pair{random_vector(rng, 4, 3.0), random_vector(rng, 4, 3.0)};
    const auto spec = preset_objective(Preset::R3C);
    const auto out = r3c_apply(inst, pi, pair, spec);
    EXPECT_EQ(out.v_return, bellman_return_apply(inst, pi, pair.v_return, BellmanMode::robust_inf));
    EXPECT_EQ(out.v_cost, bellman_cost_apply(inst, pi, pair.v_cost, BellmanMode::robust_sup));
}

TEST(R3CApply, FixedPointIsStable) {
    const auto inst = two_state_instance();
    const ValuePair fp{{1, 0}, {1, 2}};
    const auto out = r3c_apply(inst, kOnly, fp, preset_objective(Preset::R3C));
    EXPECT_LE(sup_norm_diff(out.v_return, fp.v_return), 1e-12);
    EXPECT_LE(sup_norm_diff(out.v_cost, fp.v_cost), 1e-12);
}

TEST(PolicyEvaluation, ZeroDiscountSingleApplication) {
    Rng rng(4);
    InstanceData d = random_instance(rng, {4, 2, 2, 0.9, 0.3}).data();
    d.discount = 0.0;
    const RCMDPInstance inst(d);
    const auto pi = random_policy(rng, 4, 2);
    const auto ev = policy_evaluation(inst, pi, preset_objective(Preset::R3C));
    EXPECT_EQ(ev.iterations, 1u);
    for (std::size_t s = 0; s < 4; ++s) {
        EXPECT_EQ(ev.values.v_return[s], inst.reward()(s, pi(s)));
        EXPECT_EQ(ev.values.v_cost[s], inst.cost()(s, pi(s)));
    }
}

TEST(PolicyEvaluation, RespectsIterationBound) {
    Rng rng(8);
    for (double g : {0.5, 0.9, 0.99}) {
        const auto inst = random_instance(rng, {5, 2, 3, g, 0.3});
        const auto pi = random_policy(rng, 5, 2);
        for (Preset p : kAllPresets) {
            const auto ev = policy_evaluation(inst, pi, preset_objective(p), {1e-9, 100000, Exec::parallel});
            EXPECT_LE(ev.iterations, iteration_bound(inst, 1e-9));
            EXPECT_LT(ev.last_change, 1e-9);
        }
    }
}

TEST(PolicyEvaluation, ThrowsWhenBudgetExhausted) {
    Rng rng(8);
    const auto inst = random_instance(rng, {5, 2, 3, 0.99, 0.3});
    EXPECT_THROW(policy_evaluation(inst, Policy::constant(5, 0), preset_objective(Preset::C), {1e-9, 3, Exec::serial}),
                 ConvergenceError);
}

TEST(PolicyEvaluation, SandwichOnFixedPoints) {
    Rng rng(17);
    for (int i = 0; i < 40; ++i) {
        const auto inst = random_instance(rng, {4, 2, 3, 0.9, 0.3});
        const auto pi = random_policy(rng, 4, 2);
        const EvaluationOptions opt{1e-11, 100000, Exec::serial};
        const auto robust = policy_evaluation(inst, pi, preset_objective(Preset::R3C), opt).values;
        const auto nominal = policy_evaluation(inst, pi, preset_objective(Preset::C), opt).values;
        for (std::size_t s = 0; s < 4; ++s) {
            EXPECT_LE(robust.v_return[s], nominal.v_return[s] + 1e-9);
            EXPECT_GE(robust.v_cost[s], nominal.v_cost[s] - 1e-9);
        }
    }
}

TEST(Execution, SerialAndParallelBitwiseEqual) {
    Rng rng(33);
    const auto inst = random_instance(rng, {300, 3, 3, 0.95, 0.5});
    const auto pi = random_policy(rng, 300, 3);
    const ValuePair pair{random_vector(rng, 300, 5.0), random_vector(rng, 300, 5.0)};
    for (Preset p : kAllPresets) {
        const auto spec = preset_objective(p);
        EXPECT_EQ(r3c_apply(inst, pi, pair, spec, Exec::serial), r3c_apply(inst, pi, pair, spec, Exec::parallel));
        EXPECT_EQ(policy_evaluation(inst, pi, spec, {1e-9, 100000, Exec::serial}).values,
                  policy_evaluation(inst, pi, spec, {1e-9, 100000, Exec::parallel}).values);
    }
}

TEST(IterationBound, MatchesFormula) {
    const auto inst = two_state_instance();
    const double expected = std::ceil(std::log(1e-9 * 0.5 / 1.0) / std::log(0.5));
    EXPECT_EQ(iteration_bound(inst, 1e-9), static_cast<std::size_t>(expected));
}
