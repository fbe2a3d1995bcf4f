#include "rcmdp/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rcmdp {

double StateActionTable::max_abs() const {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
}

namespace {

std::string coord(std::size_t member, std::size_t s, std::size_t a) {
    std::ostringstream os;
    os << "(member " << member << ", s=" << s << ", a=" << a << ")";
    return os.str();
}

void check_table(const StateActionTable& t, std::string_view name, const InstanceData& d, bool non_negative,
                 std::vector<Violation>& out) {
    if (t.n_states() != d.n_states || t.n_actions() != d.n_actions) {
        out.push_back({std::string(name) + " table has shape " + std::to_string(t.n_states()) + "x" +
                       std::to_string(t.n_actions()) + ", expected " + std::to_string(d.n_states) + "x" +
                       std::to_string(d.n_actions)});
        return;
    }
    for (std::size_t s = 0; s < d.n_states; ++s) {
        for (std::size_t a = 0; a < d.n_actions; ++a) {
            const double x = t(s, a);
            if (!std::isfinite(x)) {
                out.push_back({std::string(name) + " is not finite at (s=" + std::to_string(s) +
                               ", a=" + std::to_string(a) + ")"});
            } else if (non_negative && x < 0.0) {
                out.push_back({std::string(name) + " is negative at (s=" + std::to_string(s) +
                               ", a=" + std::to_string(a) + ")"});
            }
        }
    }
}

}  // namespace

std::vector<Violation> validate_instance(const InstanceData& d) {
    std::vector<Violation> out;
    if (d.n_states == 0) out.push_back({"n_states must be positive"});
    if (d.n_actions == 0) out.push_back({"n_actions must be positive"});
    if (!(d.discount < 1.0)) out.push_back({"discount must be < 1"});
    if (!(d.discount >= 0.0)) out.push_back({"discount must be >= 0"});
    if (!(std::isfinite(d.threshold_beta) && d.threshold_beta >= 0.0)) {
        out.push_back({"threshold beta must be finite and >= 0"});
    }
    check_table(d.reward, "reward", d, false, out);
    check_table(d.cost, "cost", d, true, out);

    const std::size_t n_members = d.uncertainty.size();
    if (n_members == 0) {
        out.push_back({"uncertainty set must have at least one member"});
    } else if (d.nominal_index >= n_members) {
        out.push_back({"nominal_index " + std::to_string(d.nominal_index) + " is not a member index (N=" +
                       std::to_string(n_members) + ")"});
    }

    for (std::size_t m = 0; m < n_members; ++m) {
        const Kernel& k = d.uncertainty.members[m];
        if (k.n_states() != d.n_states || k.n_actions() != d.n_actions) {
            out.push_back({"member " + std::to_string(m) + " has mismatched state/action dimensions"});
            continue;
        }
        for (std::size_t s = 0; s < d.n_states; ++s) {
            for (std::size_t a = 0; a < d.n_actions; ++a) {
                double mass = 0.0;
                bool bad_entry = false;
                for (double p : k.row(s, a)) {
                    if (!std::isfinite(p) || p < 0.0) bad_entry = true;
                    mass += p;
                }
                if (bad_entry) out.push_back({"negative or non-finite probability at " + coord(m, s, a)});
                if (!(std::abs(mass - 1.0) <= kRowMassTolerance)) {
                    out.push_back({"row mass != 1 at " + coord(m, s, a)});
                }
            }
        }
    }
    return out;
}

namespace {

std::string join_violations(const std::vector<Violation>& v) {
    std::string msg = "invalid RC-MDP instance:";
    for (const auto& x : v) msg += "\n  " + x.message;
    return msg;
}

}  // namespace

InvalidInstanceError::InvalidInstanceError(std::vector<Violation> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

RCMDPInstance::RCMDPInstance(InstanceData data) : data_(std::move(data)) {
    auto violations = validate_instance(data_);
    if (!violations.empty()) throw InvalidInstanceError(std::move(violations));
}

RCMDPInstance RCMDPInstance::with_uncertainty(UncertaintySet set, std::size_t nominal_index) const {
    InstanceData d = data_;
    d.uncertainty = std::move(set);
    d.nominal_index = nominal_index;
    return RCMDPInstance(std::move(d));
}

void Policy::check_against(const RCMDPInstance& inst) const {
    if (action_of_.size() != inst.n_states()) {
        throw std::invalid_argument("policy covers " + std::to_string(action_of_.size()) + " states, instance has " +
                                    std::to_string(inst.n_states()));
    }
    for (std::size_t s = 0; s < action_of_.size(); ++s) {
        if (action_of_[s] >= inst.n_actions()) {
            throw std::invalid_argument("policy action " + std::to_string(action_of_[s]) + " at state " +
                                        std::to_string(s) + " is out of range");
        }
    }
}

std::vector<double> combined_value(const ValuePair& pair, double lambda) {
    if (pair.v_return.size() != pair.v_cost.size()) {
        throw std::invalid_argument("combined_value: return and cost vectors differ in length");
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("combined_value: lambda must be >= 0");
    std::vector<double> out(pair.v_return.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pair.v_return[i] - lambda * pair.v_cost[i];
    return out;
}

ObjectiveSpec preset_objective(Preset preset) {
    switch (preset) {
        case Preset::C: return {ReturnMode::nominal, CostMode::nominal, preset};
        case Preset::R: return {ReturnMode::robust_inf, CostMode::nominal, preset};
        case Preset::RC: return {ReturnMode::nominal, CostMode::robust_sup, preset};
        case Preset::R3C: return {ReturnMode::robust_inf, CostMode::robust_sup, preset};
        case Preset::SR3C: return {ReturnMode::soft_mean, CostMode::robust_sup, preset};
    }
    throw std::invalid_argument("unknown preset");
}

ObjectiveSpec preset_objective(std::string_view name) {
    for (Preset p : kAllPresets) {
        if (preset_name(p) == name) return preset_objective(p);
    }
    throw std::invalid_argument("unknown objective '" + std::string(name) + "'; expected one of C, R, RC, R3C, SR3C");
}

std::string_view preset_name(Preset preset) {
    switch (preset) {
        case Preset::C: return "C";
        case Preset::R: return "R";
        case Preset::RC: return "RC";
        case Preset::R3C: return "R3C";
        case Preset::SR3C: return "SR3C";
    }
    return "?";
}

std::string_view mode_name(ReturnMode mode) {
    switch (mode) {
        case ReturnMode::nominal: return "nominal";
        case ReturnMode::robust_inf: return "robust_inf";
        case ReturnMode::soft_mean: return "soft_mean";
    }
    return "?";
}

std::string_view mode_name(CostMode mode) {
    switch (mode) {
        case CostMode::nominal: return "nominal";
        case CostMode::robust_sup: return "robust_sup";
        case CostMode::soft_mean: return "soft_mean";
    }
    return "?";
}

LagrangeState::LagrangeState(double lambda, double step_size, double lambda_max)
    : lambda_(lambda), step_size_(step_size), lambda_max_(lambda_max) {
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw std::invalid_argument("lambda_max must be > 0");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw std::invalid_argument("step_size must be > 0");
    if (!(lambda >= 0.0 && lambda <= lambda_max)) {
        throw std::invalid_argument("lambda must lie in [0, lambda_max]");
    }
}

LagrangeState LagrangeState::with_lambda(double lambda) const {
    return LagrangeState(std::clamp(lambda, 0.0, lambda_max_), step_size_, lambda_max_);
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("sup_norm_diff: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace rcmdp
