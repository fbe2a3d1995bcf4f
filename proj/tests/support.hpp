#pragma once

#include "rcmdp/core.hpp"
#include "rcmdp/envs.hpp"
#include "rcmdp/io.hpp"

#include <string>
#include <vector>

namespace rcmdp::fixtures {

inline const char* tasks_dir() { return RCMDP_TASKS_DIR; }

inline std::vector<std::string> default_suite() {
    return {"chain_short", "chain_long", "grid_cliff", "grid_cliff_wide", "grid_wall", "grid_bridge"};
}

inline TaskDefinition load_task(const std::string& name) {
    return io::task_from_json(io::read_json(std::string(tasks_dir()) + "/" + name + ".task"));
}

/// Two states, one action. s1 absorbs with r = 0, c = 1. From s0 (r = 1, c = 0)
/// member 0 self-loops and member 1 jumps to s1. Member 0 is nominal; g = 0.5.
inline InstanceData two_state_data() {
    InstanceData d;
    d.n_states = 2;
    d.n_actions = 1;
    d.reward = StateActionTable(2, 1);
    d.cost = StateActionTable(2, 1);
    d.reward(0, 0) = 1.0;
    d.cost(1, 0) = 1.0;
    d.discount = 0.5;
    d.threshold_beta = 0.0;
    d.nominal_index = 0;
    Kernel stay(2, 1), jump(2, 1);
    stay(0, 0, 0) = 1.0;
    stay(1, 0, 1) = 1.0;
    jump(0, 0, 1) = 1.0;
    jump(1, 0, 1) = 1.0;
    d.uncertainty.members = {stay, jump};
    return d;
}

inline RCMDPInstance two_state_instance() { return RCMDPInstance(two_state_data()); }

/// Single-member instance from explicit tables and deterministic next states.
inline RCMDPInstance deterministic_instance(const std::vector<std::vector<double>>& reward,
                                            const std::vector<std::vector<double>>& cost,
                                            const std::vector<std::vector<std::size_t>>& next, double discount,
                                            double beta = 0.0) {
    InstanceData d;
    d.n_states = reward.size();
    d.n_actions = reward.front().size();
    d.reward = StateActionTable(d.n_states, d.n_actions);
    d.cost = StateActionTable(d.n_states, d.n_actions);
    Kernel k(d.n_states, d.n_actions);
    for (std::size_t s = 0; s < d.n_states; ++s) {
        for (std::size_t a = 0; a < d.n_actions; ++a) {
            d.reward(s, a) = reward[s][a];
            d.cost(s, a) = cost[s][a];
            k(s, a, next[s][a]) = 1.0;
        }
    }
    d.discount = discount;
    d.threshold_beta = beta;
    d.uncertainty.members = {k};
    return RCMDPInstance(d);
}

}  // namespace rcmdp::fixtures
