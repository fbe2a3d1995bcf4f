#include "rcmdp/verify.hpp"

#include "rcmdp/evaluation.hpp"
#include "rcmdp/oracle.hpp"
#include "rcmdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rcmdp::verify {

namespace {

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

RCMDPInstance sample_instance(Rng& rng, std::size_t i, std::size_t max_states = 8, std::size_t max_actions = 3,
                              std::size_t max_members = 4) {
    RandomShape shape;
    shape.n_states = uniform_size(rng, 2, max_states);
    shape.n_actions = uniform_size(rng, 1, max_actions);
    shape.n_members = uniform_size(rng, 1, max_members);
    shape.discount = kSampleDiscounts[i % std::size(kSampleDiscounts)];
    return random_instance(rng, shape);
}

StartDistribution random_start(Rng& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> w(n);
    double mass = 0.0;
    for (double& x : w) mass += (x = unit(rng) + 1e-3);
    for (double& x : w) x /= mass;
    return StartDistribution(std::move(w));
}

ObjectiveSpec random_spec(Rng& rng) { return preset_objective(kAllPresets[uniform_size(rng, 0, 4)]); }

constexpr BellmanMode kAllModes[] = {BellmanMode::nominal, BellmanMode::robust_inf, BellmanMode::robust_sup,
                                     BellmanMode::soft_mean};

PropertyResult finish(PropertyResult r) {
    r.passed = r.passed && r.max_violation <= r.tolerance;
    return r;
}

}  // namespace

PropertyResult check_contraction(const std::string& name, const Backup& backup, Rng& rng, std::size_t samples) {
    PropertyResult r{name, samples, -std::numeric_limits<double>::infinity(), kContractionSlack, true, {}};
    std::uniform_real_distribution<double> shift(-5.0, 5.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i);
        const Policy policy = random_policy(rng, inst.n_states(), inst.n_actions());
        const auto u = random_vector(rng, inst.n_states(), 10.0);
        std::vector<double> v;
        if (i % 4 == 3) {
            const double c = shift(rng);
            v = u;
            for (double& x : v) x += c;
        } else {
            v = random_vector(rng, inst.n_states(), 10.0);
        }
        const double lhs = sup_norm_diff(backup(inst, policy, u), backup(inst, policy, v));
        const double rhs = inst.discount() * sup_norm_diff(u, v);
        r.max_violation = std::max(r.max_violation, lhs - rhs);
    }
    return finish(r);
}

std::vector<PropertyResult> check_all_contractions(Rng& rng, std::size_t samples) {
    auto ret = [](BellmanMode m) -> Backup {
        return [m](const RCMDPInstance& inst, const Policy& p, std::span<const double> v) {
            return bellman_return_apply(inst, p, v, m);
        };
    };
    auto cost = [](BellmanMode m) -> Backup {
        return [m](const RCMDPInstance& inst, const Policy& p, std::span<const double> v) {
            return bellman_cost_apply(inst, p, v, m);
        };
    };
    // the other component is held at zero; each R3C component is backed up independently
    const Backup r3c_return = [](const RCMDPInstance& inst, const Policy& p, std::span<const double> v) {
        ValuePair pair{{v.begin(), v.end()}, std::vector<double>(v.size(), 0.0)};
        return r3c_apply(inst, p, pair, preset_objective(Preset::R3C)).v_return;
    };
    const Backup r3c_cost = [](const RCMDPInstance& inst, const Policy& p, std::span<const double> v) {
        ValuePair pair{std::vector<double>(v.size(), 0.0), {v.begin(), v.end()}};
        return r3c_apply(inst, p, pair, preset_objective(Preset::R3C)).v_cost;
    };
    return {check_contraction("contraction/return_inf", ret(BellmanMode::robust_inf), rng, samples),
            check_contraction("contraction/return_nominal", ret(BellmanMode::nominal), rng, samples),
            check_contraction("contraction/return_soft_mean", ret(BellmanMode::soft_mean), rng, samples),
            check_contraction("contraction/cost_sup", cost(BellmanMode::robust_sup), rng, samples),
            check_contraction("contraction/cost_nominal", cost(BellmanMode::nominal), rng, samples),
            check_contraction("contraction/cost_soft_mean", cost(BellmanMode::soft_mean), rng, samples),
            check_contraction("contraction/r3c_return", r3c_return, rng, samples),
            check_contraction("contraction/r3c_cost", r3c_cost, rng, samples)};
}

PropertyResult check_mode_ordering(Rng& rng, std::size_t samples) {
    PropertyResult r{"mode_ordering", samples, 0.0, 0.0, true, {}};
    for (std::size_t i = 0; i < samples; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i);
        const auto v = random_vector(rng, inst.n_states(), 10.0);
        for (std::size_t s = 0; s < inst.n_states(); ++s) {
            for (std::size_t a = 0; a < inst.n_actions(); ++a) {
                const auto& set = inst.uncertainty();
                const std::size_t nom = inst.nominal_index();
                const double lo = sigma_select(v, s, a, set, BellmanMode::robust_inf, nom);
                const double mean = sigma_select(v, s, a, set, BellmanMode::soft_mean, nom);
                const double hi = sigma_select(v, s, a, set, BellmanMode::robust_sup, nom);
                const double nominal = sigma_select(v, s, a, set, BellmanMode::nominal, nom);
                r.max_violation = std::max({r.max_violation, lo - mean, mean - hi, lo - nominal, nominal - hi});
            }
        }
    }
    return finish(r);
}

PropertyResult check_degenerate_set(Rng& rng, std::size_t samples) {
    PropertyResult r{"degenerate_set_modes_agree", samples, 0.0, 0.0, true, {}};
    for (std::size_t i = 0; i < samples; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i, 8, 3, 1);
        const auto v = random_vector(rng, inst.n_states(), 10.0);
        for (std::size_t s = 0; s < inst.n_states(); ++s) {
            for (std::size_t a = 0; a < inst.n_actions(); ++a) {
                const double ref = sigma_select(v, s, a, inst.uncertainty(), BellmanMode::nominal, 0);
                for (BellmanMode m : kAllModes) {
                    const double x = sigma_select(v, s, a, inst.uncertainty(), m, 0);
                    if (x != ref) {
                        r.passed = false;
                        r.max_violation = std::max(r.max_violation, std::abs(x - ref));
                    }
                }
            }
        }
    }
    return finish(r);
}

PropertyResult check_monotonicity(Rng& rng, std::size_t samples) {
    PropertyResult r{"monotonicity", samples, 0.0, 0.0, true, {}};
    std::uniform_real_distribution<double> bump(0.0, 3.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i);
        const Policy policy = random_policy(rng, inst.n_states(), inst.n_actions());
        const auto u = random_vector(rng, inst.n_states(), 10.0);
        auto v = u;
        for (double& x : v) x += bump(rng);
        for (BellmanMode m : kAllModes) {
            const auto tu = policy_backup(inst.reward(), inst.uncertainty(), inst.nominal_index(), inst.discount(),
                                          policy, u, m);
            const auto tv = policy_backup(inst.reward(), inst.uncertainty(), inst.nominal_index(), inst.discount(),
                                          policy, v, m);
            for (std::size_t s = 0; s < tu.size(); ++s) r.max_violation = std::max(r.max_violation, tu[s] - tv[s]);
        }
    }
    return finish(r);
}

PropertyResult check_negation_duality(Rng& rng, std::size_t samples) {
    PropertyResult r{"negation_duality", samples, 0.0, 0.0, true, {}};
    for (std::size_t i = 0; i < samples; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i);
        const Policy policy = random_policy(rng, inst.n_states(), inst.n_actions());
        const auto v = random_vector(rng, inst.n_states(), 10.0);
        std::vector<double> neg_v(v.size());
        std::transform(v.begin(), v.end(), neg_v.begin(), [](double x) { return -x; });
        StateActionTable neg_cost(inst.n_states(), inst.n_actions());
        for (std::size_t s = 0; s < inst.n_states(); ++s) {
            for (std::size_t a = 0; a < inst.n_actions(); ++a) neg_cost(s, a) = -inst.cost()(s, a);
        }
        const auto sup = bellman_cost_apply(inst, policy, v, BellmanMode::robust_sup);
        const auto inf = policy_backup(neg_cost, inst.uncertainty(), inst.nominal_index(), inst.discount(), policy,
                                       neg_v, BellmanMode::robust_inf);
        for (std::size_t s = 0; s < sup.size(); ++s) {
            if (sup[s] != -inf[s]) {
                r.passed = false;
                r.max_violation = std::max(r.max_violation, std::abs(sup[s] + inf[s]));
            }
        }
    }
    return finish(r);
}

PropertyResult check_parallel_determinism(Rng& rng, std::size_t samples) {
    PropertyResult r{"serial_parallel_bitwise", samples, 0.0, 0.0, true, {}};
    for (std::size_t i = 0; i < samples; ++i) {
        RandomShape shape;
        shape.n_states = uniform_size(rng, 2, 200);
        shape.n_actions = uniform_size(rng, 1, 3);
        shape.n_members = uniform_size(rng, 1, 3);
        shape.discount = kSampleDiscounts[i % 3];
        const RCMDPInstance inst = random_instance(rng, shape);
        const Policy policy = random_policy(rng, inst.n_states(), inst.n_actions());
        const ValuePair pair{random_vector(rng, inst.n_states(), 10.0), random_vector(rng, inst.n_states(), 10.0)};
        const ObjectiveSpec spec = random_spec(rng);
        if (r3c_apply(inst, policy, pair, spec, Exec::serial) != r3c_apply(inst, policy, pair, spec, Exec::parallel)) {
            r.passed = false;
            r.max_violation = 1.0;
        }
    }
    return finish(r);
}

PropertyResult check_fixed_point(Rng& rng, std::size_t samples) {
    PropertyResult r{"fixed_point", samples, -std::numeric_limits<double>::infinity(), kFixedPointTolerance, true, {}};
    std::size_t worst_iterations = 0;
    std::size_t worst_bound = 1;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i);
        const Policy policy = random_policy(rng, inst.n_states(), inst.n_actions());
        const ObjectiveSpec spec = random_spec(rng);
        EvaluationOptions opts;
        opts.tol = kFixedPointTolerance;
        const auto eval = policy_evaluation(inst, policy, spec, opts);
        const std::size_t bound = iteration_bound(inst, opts.tol);
        const double ratio = static_cast<double>(eval.iterations) / static_cast<double>(bound);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_iterations = eval.iterations;
            worst_bound = bound;
        }
        if (eval.iterations > bound) r.passed = false;
        const ValuePair again = r3c_apply(inst, policy, eval.values, spec);
        const double moved = std::max(sup_norm_diff(again.v_return, eval.values.v_return),
                                      sup_norm_diff(again.v_cost, eval.values.v_cost));
        // strict inequality: a move equal to the tolerance counts as a miss
        r.max_violation = std::max(r.max_violation, moved);
        if (!(moved < kFixedPointTolerance)) r.passed = false;
    }
    std::ostringstream os;
    os << "worst iterations/bound = " << worst_iterations << "/" << worst_bound;
    r.detail = os.str();
    // max_violation holds the largest re-application move; finish() compares it
    return finish(r);
}

OracleCertification check_oracle_certification(Rng& rng, std::size_t instances) {
    OracleCertification out{{"oracle_certification", instances, 0.0, kOracleTolerance, true, {}},
                            {"oracle_witness_validity", instances, 0.0, 1e-10, true, {}}};
    EvaluationOptions opts;
    opts.tol = 1e-13;
    opts.max_iters = 1'000'000;
    for (std::size_t i = 0; i < instances; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i, 4, 2, 3);
        const Policy policy = random_policy(rng, inst.n_states(), inst.n_actions());
        const StartDistribution start = random_start(rng, inst.n_states());
        const auto eval = policy_evaluation(inst, policy, preset_objective(Preset::R3C), opts);

        const auto lo = oracle::brute_force_value(inst, policy, oracle::Channel::return_value, oracle::Extremum::min,
                                                  start);
        const auto hi = oracle::brute_force_value(inst, policy, oracle::Channel::cost_value, oracle::Extremum::max,
                                                  start);
        out.value.max_violation = std::max({out.value.max_violation,
                                            std::abs(start.expect(eval.values.v_return) - lo.value),
                                            std::abs(start.expect(eval.values.v_cost) - hi.value)});

        const Returns lo_again = exact_returns(oracle::induced_kernel(inst, lo.witness), inst, policy, start);
        const Returns hi_again = exact_returns(oracle::induced_kernel(inst, hi.witness), inst, policy, start);
        out.witness.max_violation = std::max(
            {out.witness.max_violation, std::abs(lo_again.j_return - lo.value), std::abs(hi_again.j_cost - hi.value)});
    }
    out.value = finish(out.value);
    out.witness = finish(out.witness);
    return out;
}

PropertyResult check_exact_vs_iterative(Rng& rng, std::size_t samples) {
    PropertyResult r{"exact_vs_iterative", samples, 0.0, 1e-9, true, {}};
    EvaluationOptions opts;
    opts.tol = 1e-13;
    opts.max_iters = 1'000'000;
    for (std::size_t i = 0; i < samples; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i, 8, 3, 1);
        const Policy policy = random_policy(rng, inst.n_states(), inst.n_actions());
        const auto iterative = policy_evaluation(inst, policy, preset_objective(Preset::C), opts);
        const ExactValues exact = exact_values(inst.nominal_kernel(), inst, policy);
        r.max_violation = std::max({r.max_violation, sup_norm_diff(iterative.values.v_return, exact.v_return),
                                    sup_norm_diff(iterative.values.v_cost, exact.v_cost)});
    }
    return finish(r);
}

PropertyResult report_solver_gap(Rng& rng, std::size_t instances) {
    PropertyResult r{"solver_vs_oracle_gap", instances, 0.0, std::numeric_limits<double>::infinity(), true, {}};
    std::ostringstream os;
    std::size_t gaps = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        const RCMDPInstance inst = sample_instance(rng, i, 3, 2, 2);
        const ObjectiveSpec spec = random_spec(rng);
        const StartDistribution start = StartDistribution::point_mass(inst.n_states(), 0);
        SolveOptions opts;
        opts.outer_iters = 300;
        const SolveReport report = solve(inst, spec, start, LagrangeState(0.0, 0.1, 1000.0), opts);
        const auto best = oracle::brute_force_policy_search(inst, spec, inst.threshold_beta(), start);
        if (!best.feasible) continue;
        const double gap = best.best_return - report.return_value;
        if (!report.feasible || gap > 1e-6) {
            ++gaps;
            r.max_violation = std::max(r.max_violation, report.feasible ? gap : best.best_return);
            os << "[" << preset_name(spec.preset) << " instance " << i << ": solver feasible="
               << (report.feasible ? "true" : "false") << " return=" << report.return_value
               << " oracle=" << best.best_return << "] ";
        }
    }
    r.detail = std::to_string(gaps) + " gap(s) " + os.str();
    return r;
}

std::vector<PropertyResult> run_verification(Level level, std::uint64_t seed) {
    const bool full = level == Level::full;
    const std::size_t samples = full ? 1000 : 240;
    std::vector<PropertyResult> out;
    std::uint64_t stream = 0;
    auto next_rng = [&] {
        std::seed_seq seq{seed, ++stream};
        return Rng(seq);
    };

    Rng contraction_rng = next_rng();
    for (auto& r : check_all_contractions(contraction_rng, samples)) out.push_back(std::move(r));
    Rng a = next_rng();
    out.push_back(check_mode_ordering(a, samples));
    Rng b = next_rng();
    out.push_back(check_degenerate_set(b, samples));
    Rng c = next_rng();
    out.push_back(check_monotonicity(c, samples));
    Rng d = next_rng();
    out.push_back(check_negation_duality(d, samples));
    Rng e = next_rng();
    out.push_back(check_parallel_determinism(e, full ? 100 : 20));
    Rng f = next_rng();
    out.push_back(check_fixed_point(f, full ? 500 : 100));
    Rng g = next_rng();
    auto oracle_result = check_oracle_certification(g, full ? 200 : 50);
    out.push_back(std::move(oracle_result.value));
    out.push_back(std::move(oracle_result.witness));
    Rng h = next_rng();
    out.push_back(check_exact_vs_iterative(h, full ? 500 : 100));
    Rng k = next_rng();
    out.push_back(report_solver_gap(k, full ? 40 : 8));
    return out;
}

}  // namespace rcmdp::verify
