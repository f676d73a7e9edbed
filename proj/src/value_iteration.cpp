#include "cma/value_iteration.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cma {

std::pair<std::vector<double>, std::vector<double>> bellman_backup(
    const std::vector<double>& v, const TransitionModel& t, const RewardModel& r,
    const LegalityMask& legality, double discount) {
    const int n = t.n_states;
    const int na = t.n_actions;
    std::vector<double> q(static_cast<std::size_t>(n) * na, 0.0);
    std::vector<double> v_new(n, 0.0);
    for (int s = 0; s < n; ++s) {
        double best = 0.0;
        bool have_best = false;
        for (int a = 0; a < na; ++a) {
            double expected = 0.0;
            for (const auto& e : t.row(a, s)) expected += e.p * v[e.to];
            const double qa = r.at(s, a) + discount * expected;
            q[static_cast<std::size_t>(s) * na + a] = qa;
            if (((legality[s] >> a) & 1) && (!have_best || qa > best)) {
                best = qa;
                have_best = true;
            }
        }
        if (!have_best) throw std::logic_error("bellman_backup: state with no legal action");
        v_new[s] = best;
    }
    return {std::move(v_new), std::move(q)};
}

ValueFunction value_iteration(const TransitionModel& t, const RewardModel& r,
                              const LegalityMask& legality, const SolverConfig& config) {
    if (!(config.discount > 0.0 && config.discount < 1.0))
        throw std::invalid_argument("value_iteration: discount must be in (0,1)");
    if (!(config.bellman_tolerance > 0.0))
        throw std::invalid_argument("value_iteration: tolerance must be > 0");

    ValueFunction vf;
    vf.discount = config.discount;
    vf.n_actions = t.n_actions;
    vf.v.assign(t.n_states, 0.0);

    double residual = 0.0;
    int it = 0;
    for (; it < config.max_iterations; ++it) {
        auto [v_new, q] = bellman_backup(vf.v, t, r, legality, config.discount);
        residual = 0.0;
        for (int s = 0; s < t.n_states; ++s) residual = std::max(residual, std::abs(v_new[s] - vf.v[s]));
        vf.v = std::move(v_new);
        vf.q = std::move(q);
        if (residual <= config.bellman_tolerance) break;
    }
    if (residual > config.bellman_tolerance) {
        std::ostringstream ss;
        ss << "value_iteration: no convergence after " << config.max_iterations
           << " iterations (residual " << residual << ")";
        throw std::runtime_error(ss.str());
    }
    vf.residual = residual;
    vf.iterations = it + 1;

    vf.policy.assign(t.n_states, 0);
    for (int s = 0; s < t.n_states; ++s) {
        int best_a = -1;
        double best = 0.0;
        for (int a = 0; a < t.n_actions; ++a) {
            if (!((legality[s] >> a) & 1)) continue;
            const double qa = vf.q_at(s, a);
            if (best_a < 0 || qa > best) {
                best_a = a;
                best = qa;
            }
        }
        vf.policy[s] = best_a;
        vf.v[s] = best;
    }
    return vf;
}

}  // namespace cma
