#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rcmdp {

/// Absolute tolerance on the mass of every transition row.
inline constexpr double kRowMassTolerance = 1e-12;

/// Dense table indexed by (state, action).
class StateActionTable {
public:
    StateActionTable() = default;
    StateActionTable(std::size_t n_states, std::size_t n_actions, double fill = 0.0)
        : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, fill) {}

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double operator()(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }
    double& operator()(std::size_t s, std::size_t a) { return values_[s * n_actions_ + a]; }

    std::span<const double> values() const { return values_; }
    double max_abs() const;

    bool operator==(const StateActionTable&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> values_;
};

/// A full transition kernel p(s' | s, a), stored row-major by (s, a).
class Kernel {
public:
    Kernel() = default;
    Kernel(std::size_t n_states, std::size_t n_actions)
        : n_states_(n_states), n_actions_(n_actions), probs_(n_states * n_actions * n_states, 0.0) {}

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    std::span<const double> row(std::size_t s, std::size_t a) const {
        return {probs_.data() + (s * n_actions_ + a) * n_states_, n_states_};
    }
    std::span<double> row(std::size_t s, std::size_t a) {
        return {probs_.data() + (s * n_actions_ + a) * n_states_, n_states_};
    }

    double operator()(std::size_t s, std::size_t a, std::size_t next) const { return row(s, a)[next]; }
    double& operator()(std::size_t s, std::size_t a, std::size_t next) { return row(s, a)[next]; }

    bool operator==(const Kernel&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> probs_;
};

/// Finite sa-rectangular uncertainty set: the adversary may pick any member's
/// row independently at every (state, action).
struct UncertaintySet {
    std::vector<Kernel> members;

    std::size_t size() const { return members.size(); }
    bool operator==(const UncertaintySet&) const = default;
};

/// Raw, unchecked instance fields. This is what parsers and generators fill
/// in; it becomes an RCMDPInstance only after validation.
struct InstanceData {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    StateActionTable reward;
    StateActionTable cost;
    double discount = 0.0;
    double threshold_beta = 0.0;
    std::size_t nominal_index = 0;
    UncertaintySet uncertainty;

    bool operator==(const InstanceData&) const = default;
};

struct Violation {
    std::string message;
};

/// Every violated invariant of `data`, with (member, state, action)
/// coordinates where they apply. Empty means the data is a valid instance.
std::vector<Violation> validate_instance(const InstanceData& data);

class InvalidInstanceError : public std::invalid_argument {
public:
    explicit InvalidInstanceError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// A validated, immutable RC-MDP with a single cost channel.
class RCMDPInstance {
public:
    /// Throws InvalidInstanceError unless validate_instance(data) is empty.
    explicit RCMDPInstance(InstanceData data);

    std::size_t n_states() const { return data_.n_states; }
    std::size_t n_actions() const { return data_.n_actions; }
    const StateActionTable& reward() const { return data_.reward; }
    const StateActionTable& cost() const { return data_.cost; }
    double discount() const { return data_.discount; }
    double threshold_beta() const { return data_.threshold_beta; }
    std::size_t nominal_index() const { return data_.nominal_index; }
    const UncertaintySet& uncertainty() const { return data_.uncertainty; }
    const Kernel& nominal_kernel() const { return data_.uncertainty.members[data_.nominal_index]; }

    const InstanceData& data() const { return data_; }

    /// Same rewards, costs, discount and threshold, with a new uncertainty set.
    RCMDPInstance with_uncertainty(UncertaintySet set, std::size_t nominal_index) const;

    bool operator==(const RCMDPInstance&) const = default;

private:
    InstanceData data_;
};

/// Deterministic stationary policy.
class Policy {
public:
    Policy() = default;
    explicit Policy(std::vector<std::size_t> action_of) : action_of_(std::move(action_of)) {}
    static Policy constant(std::size_t n_states, std::size_t action) {
        return Policy(std::vector<std::size_t>(n_states, action));
    }

    std::size_t operator()(std::size_t s) const { return action_of_[s]; }
    std::size_t size() const { return action_of_.size(); }
    const std::vector<std::size_t>& actions() const { return action_of_; }

    /// Throws std::invalid_argument if the policy does not fit the instance.
    void check_against(const RCMDPInstance& inst) const;

    bool operator==(const Policy&) const = default;
    auto operator<=>(const Policy&) const = default;

private:
    std::vector<std::size_t> action_of_;
};

/// Return and constraint value functions kept as separate estimates.
struct ValuePair {
    std::vector<double> v_return;
    std::vector<double> v_cost;

    static ValuePair zeros(std::size_t n_states) {
        return {std::vector<double>(n_states, 0.0), std::vector<double>(n_states, 0.0)};
    }
    bool operator==(const ValuePair&) const = default;
};

/// v_return - lambda * v_cost. The threshold offset never enters here; it only
/// drives the multiplier update.
std::vector<double> combined_value(const ValuePair& pair, double lambda);

enum class ReturnMode { nominal, robust_inf, soft_mean };
enum class CostMode { nominal, robust_sup, soft_mean };
enum class Preset { C, R, RC, R3C, SR3C };

struct ObjectiveSpec {
    ReturnMode return_mode;
    CostMode cost_mode;
    Preset preset;

    bool operator==(const ObjectiveSpec&) const = default;
};

inline constexpr Preset kAllPresets[] = {Preset::C, Preset::R, Preset::RC, Preset::R3C, Preset::SR3C};

ObjectiveSpec preset_objective(Preset preset);
/// Throws std::invalid_argument naming the five valid presets.
ObjectiveSpec preset_objective(std::string_view name);
std::string_view preset_name(Preset preset);
std::string_view mode_name(ReturnMode mode);
std::string_view mode_name(CostMode mode);

/// Lagrange multiplier with its step size and projection cap.
class LagrangeState {
public:
    /// Throws std::invalid_argument unless 0 <= lambda <= lambda_max, step_size > 0.
    LagrangeState(double lambda, double step_size, double lambda_max);

    double lambda() const { return lambda_; }
    double step_size() const { return step_size_; }
    double lambda_max() const { return lambda_max_; }

    /// Same step size and cap, multiplier projected onto [0, lambda_max].
    LagrangeState with_lambda(double lambda) const;

private:
    double lambda_;
    double step_size_;
    double lambda_max_;
};

double sup_norm(std::span<const double> v);
double sup_norm_diff(std::span<const double> a, std::span<const double> b);

}  // namespace rcmdp
