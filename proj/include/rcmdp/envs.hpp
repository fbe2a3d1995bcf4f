#pragma once

#include "rcmdp/core.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace rcmdp {

/// A scalar dynamics parameter varied across training and holdout environments.
struct PerturbationFamily {
    std::string family_name;
    std::string parameter_name;
    double nominal_value = 0.0;
    std::vector<double> training_values;
    std::vector<double> holdout_values;
};

/// Empty when the family is well formed.
std::vector<std::string> validate_family(const PerturbationFamily& family);

struct ChainConfig {
    std::size_t n_states = 6;
};

struct Cell {
    std::size_t x = 0;
    std::size_t y = 0;
    bool operator==(const Cell&) const = default;
};

struct GridConfig {
    std::size_t width = 5;
    std::size_t height = 3;
    Cell start{0, 0};
    Cell goal{4, 0};
    std::vector<Cell> hazards;
};

using EnvConfig = std::variant<ChainConfig, GridConfig>;

struct TaskDefinition {
    std::string env_name;
    EnvConfig env;
    PerturbationFamily perturbation;
    std::string constraint_name;
    double threshold_beta = 0.0;
    /// Cost charged per step in a hazard state, in [0, 1].
    double cost_intensity = 0.3;
    double discount = 0.9;
};

/// Chain actions.
inline constexpr std::size_t kAdvance = 0;
inline constexpr std::size_t kStay = 1;

/// Grid actions; moves into a wall leave the agent in place.
inline constexpr std::size_t kUp = 0;
inline constexpr std::size_t kRight = 1;
inline constexpr std::size_t kDown = 2;
inline constexpr std::size_t kLeft = 3;

/// Left-to-right chain with an absorbing rewarding terminal at n_states - 1.
/// `advance` moves right with probability 1 - slip and stays otherwise; `stay`
/// never moves. The last two non-terminal states charge cost_intensity per step.
/// Start state is 0.
RCMDPInstance make_chain(std::size_t n_states, double slip, double cost_intensity, double discount = 0.9,
                         double beta = 0.0);

/// Four-action gridworld. The chosen move succeeds with probability 1 - slip;
/// otherwise one of the two perpendicular moves happens, each with probability
/// slip / 2. The goal pays 1 per step and absorbs; hazard cells charge
/// cost_intensity per step.
RCMDPInstance make_gridworld(const GridConfig& grid, double slip, double cost_intensity, double discount = 0.9,
                             double beta = 0.0);

std::size_t cell_index(const GridConfig& grid, Cell c);

/// Builds the single-kernel instance of a task at one parameter value.
using InstanceBuilder = std::function<RCMDPInstance(double)>;

InstanceBuilder task_builder(const TaskDefinition& task);
std::size_t task_start_state(const TaskDefinition& task);
/// States the task charges cost in.
std::vector<std::size_t> task_hazard_states(const TaskDefinition& task);

struct HoldoutInstance {
    double param_value;
    RCMDPInstance instance;
};

struct BuiltTask {
    RCMDPInstance train;
    std::vector<HoldoutInstance> holdouts;
};

/// Training instance whose uncertainty set has one member per training value
/// (nominal_index at the nominal value), plus one single-member instance per
/// holdout value. Throws std::invalid_argument on a malformed task.
BuiltTask build_task(const TaskDefinition& task, const InstanceBuilder& builder);
BuiltTask build_task(const TaskDefinition& task);

void validate_task(const TaskDefinition& task);

/// The task `gen-task` writes when no other template is requested.
TaskDefinition default_grid_task();
TaskDefinition default_chain_task();

}  // namespace rcmdp
