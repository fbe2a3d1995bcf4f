#pragma once

#include "rcmdp/core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace rcmdp {

using Rng = std::mt19937_64;

struct RandomShape {
    std::size_t n_states = 3;
    std::size_t n_actions = 2;
    std::size_t n_members = 3;
    double discount = 0.9;
    /// Probability that a transition entry is forced to zero (a row always keeps one entry).
    double sparsity = 0.3;
};

/// Random valid instance: rewards in [-1, 1], costs in [0, 1], random rows.
RCMDPInstance random_instance(Rng& rng, const RandomShape& shape);
Policy random_policy(Rng& rng, std::size_t n_states, std::size_t n_actions);
std::vector<double> random_vector(Rng& rng, std::size_t n, double scale);

}  // namespace rcmdp
