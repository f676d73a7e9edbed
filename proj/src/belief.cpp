#include "cma/belief.hpp"

#include <cmath>
#include <stdexcept>

namespace cma {

Belief Belief::delta(int state, int n_states) {
    Belief b;
    b.p.assign(n_states, 0.0);
    b.p.at(state) = 1.0;
    return b;
}

bool Belief::valid(double tol) const {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

Belief belief_update(const Belief& b, int action, ObservationId obs, const TransitionModel& t,
                     const ObservationModel& z) {
    if (b.size() != t.n_states)
        throw std::invalid_argument("belief_update: belief/model size mismatch");
    Belief predicted;
    predicted.p.assign(t.n_states, 0.0);
    for (int s = 0; s < t.n_states; ++s) {
        const double mass = b.p[s];
        if (mass == 0.0) continue;
        for (const auto& e : t.row(action, s)) predicted.p[e.to] += mass * e.p;
    }
    double norm = 0.0;
    for (int s2 = 0; s2 < t.n_states; ++s2) {
        predicted.p[s2] *= z.prob(action, s2, obs);
        norm += predicted.p[s2];
    }
    if (norm <= 0.0)
        throw std::runtime_error("belief_update: observation " + std::to_string(obs) +
                                 " has zero probability under the predicted belief");
    for (double& v : predicted.p) v /= norm;
    return predicted;
}

StateId map_state(const Belief& b) {
    int best = 0;
    for (int s = 1; s < b.size(); ++s)
        if (b.p[s] > b.p[best]) best = s;
    return best;
}

double p_minmax(const BeliefTrajectory& traj) {
    if (traj.empty()) throw std::invalid_argument("p_minmax: empty trajectory");
    double result = 1.0;
    for (const Belief& b : traj) {
        double maxp = 0.0;
        for (double v : b.p) maxp = std::max(maxp, v);
        result = std::min(result, maxp);
    }
    return result;
}

Belief initial_belief(BatteryHealth bh) {
    const StateId s = encode({FlightStatus::Nominal, MotorHealth::NoFault, MotorMargin::MM1, bh,
                              ReachMargin::RM1});
    return Belief::delta(s, kNumStates);
}

Belief initial_belief_diffuse_bh() {
    Belief b;
    b.p.assign(kNumStates, 0.0);
    for (BatteryHealth bh : {BatteryHealth::Good, BatteryHealth::Medium, BatteryHealth::Poor}) {
        const StateId s = encode({FlightStatus::Nominal, MotorHealth::NoFault, MotorMargin::MM1,
                                  bh, ReachMargin::RM1});
        b.p[s] = 1.0 / 3.0;
    }
    return b;
}

}  // namespace cma
