#pragma once

#include <string>
#include <vector>

#include "cma/state.hpp"

namespace cma {

// Observation space: FS x MotorObs x RM factored observations plus a
// distinguished TERMINAL symbol emitted by absorbing states.
enum class MotorObs : std::uint8_t { MM0 = 0, MM1 = 1, JF = 2 };

using ObservationId = int;

inline constexpr int kNumFactoredObservations = 18;  // 3*3*2
inline constexpr int kNumObservations = 19;
inline constexpr ObservationId kObsTerminal = 18;

struct FactoredObservation {
    FlightStatus fs = FlightStatus::Nominal;
    MotorObs motor = MotorObs::MM1;
    ReachMargin rm = ReachMargin::RM1;

    friend bool operator==(const FactoredObservation&, const FactoredObservation&) = default;
};

ObservationId encode_observation(const FactoredObservation& o);
FactoredObservation decode_observation(ObservationId id);
std::string observation_name(ObservationId id);

// p(o | s') over the 19 observations; independent of the action, so stored as
// one row per next state. Flight status is observed exactly; RM and (outside
// a jam) MM are reported truthfully w.p. p_o and flipped otherwise; a jam is
// always reported as JF; absorbing states emit TERMINAL.
struct ObservationModel {
    double p_o = 1.0;
    int n_states = 0;
    int n_obs = 0;
    std::vector<double> z;  // [s'][o] flattened

    double prob(int next_state, int obs) const {
        return z[static_cast<std::size_t>(next_state) * n_obs + obs];
    }
    double prob(int /*action*/, int next_state, int obs) const { return prob(next_state, obs); }
};

// Builds the CMA observation model; p_o must lie in [0.5, 1].
ObservationModel build_observation_model(double p_o);

std::string to_json(const ObservationModel& m);

}  // namespace cma
