#include "rcmdp/random.hpp"

namespace rcmdp {

RCMDPInstance random_instance(Rng& rng, const RandomShape& shape) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, shape.n_states - 1);

    InstanceData d;
    d.n_states = shape.n_states;
    d.n_actions = shape.n_actions;
    d.discount = shape.discount;
    d.threshold_beta = unit(rng);
    d.reward = StateActionTable(shape.n_states, shape.n_actions);
    d.cost = StateActionTable(shape.n_states, shape.n_actions);
    for (std::size_t s = 0; s < shape.n_states; ++s) {
        for (std::size_t a = 0; a < shape.n_actions; ++a) {
            d.reward(s, a) = 2.0 * unit(rng) - 1.0;
            d.cost(s, a) = unit(rng);
        }
    }
    for (std::size_t m = 0; m < shape.n_members; ++m) {
        Kernel k(shape.n_states, shape.n_actions);
        for (std::size_t s = 0; s < shape.n_states; ++s) {
            for (std::size_t a = 0; a < shape.n_actions; ++a) {
                auto row = k.row(s, a);
                double mass = 0.0;
                for (double& p : row) {
                    p = unit(rng) < shape.sparsity ? 0.0 : unit(rng);
                    mass += p;
                }
                if (mass == 0.0) {
                    row[pick(rng)] = 1.0;
                    continue;
                }
                for (double& p : row) p /= mass;
            }
        }
        d.uncertainty.members.push_back(std::move(k));
    }
    d.nominal_index = std::uniform_int_distribution<std::size_t>(0, shape.n_members - 1)(rng);
    return RCMDPInstance(std::move(d));
}

Policy random_policy(Rng& rng, std::size_t n_states, std::size_t n_actions) {
    std::uniform_int_distribution<std::size_t> pick(0, n_actions - 1);
    std::vector<std::size_t> actions(n_states);
    for (auto& a : actions) a = pick(rng);
    return Policy(std::move(actions));
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

}  // namespace rcmdp
