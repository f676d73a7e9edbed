#pragma once

#include <utility>
#include <vector>

#include "cma/model.hpp"

namespace cma {

struct SolverConfig {
    double discount = 0.99;
    double bellman_tolerance = 1e-9;
    int max_iterations = 100000;
};

struct ValueFunction {
    std::vector<double> v;       // [s]
    std::vector<double> q;       // [s][a] flattened
    std::vector<int> policy;     // argmax over legal actions, ties to lowest index
    double residual = 0.0;       // final sup-norm Bellman residual
    int iterations = 0;
    double discount = 0.0;

    double q_at(int s, int a) const {
        return q[static_cast<std::size_t>(s) * n_actions + a];
    }
    int n_actions = 0;
};

// One synchronous Bellman backup: returns (new v, q-matrix) where
// q[s][a] = r(s,a) + gamma * sum_s' P[a][s][s'] v[s'] and
// v[s] = max over legal a of q[s][a].
std::pair<std::vector<double>, std::vector<double>> bellman_backup(
    const std::vector<double>& v, const TransitionModel& t, const RewardModel& r,
    const LegalityMask& legality, double discount);

// Iterates to a sup-norm residual <= config.bellman_tolerance; throws (with
// the last residual in the message) if max_iterations is exhausted.
ValueFunction value_iteration(const TransitionModel& t, const RewardModel& r,
                              const LegalityMask& legality, const SolverConfig& config = {});

inline ValueFunction value_iteration(const CmaModel& m, const SolverConfig& config = {}) {
    return value_iteration(m.transition, m.reward, m.legality, config);
}

}  // namespace cma
