#pragma once

#include <vector>

#include "cma/model.hpp"
#include "cma/observation.hpp"
#include "cma/state.hpp"

namespace cma {

// Probability distribution over states (entries >= 0, sum 1 within 1e-12).
struct Belief {
    std::vector<double> p;

    static Belief delta(int state, int n_states);
    bool valid(double tol = 1e-12) const;
    int size() const { return static_cast<int>(p.size()); }
};

// Exact Bayes filter step: b'(s') ~ z(a, s', o) * sum_s P[a][s][s'] b(s).
// Throws if the observation has zero probability under the predicted belief
// (model/trace inconsistency).
Belief belief_update(const Belief& b, int action, ObservationId obs, const TransitionModel& t,
                     const ObservationModel& z);

// Most-probable state; ties broken toward the lowest state id.
StateId map_state(const Belief& b);

using BeliefTrajectory = std::vector<Belief>;

// Belief-concentration statistic: min over time of the max state probability.
double p_minmax(const BeliefTrajectory& traj);

// Delta belief at the nominal start state {N, NF, MM1, bh, RM1}.
Belief initial_belief(BatteryHealth bh);

// Variant with the battery health unknown at mission start: uniform over the
// three BH values at the nominal features.
Belief initial_belief_diffuse_bh();

}  // namespace cma
