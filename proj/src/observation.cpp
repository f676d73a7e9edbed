#include "cma/observation.hpp"

#include <stdexcept>

#include "json.hpp"

namespace cma {

ObservationId encode_observation(const FactoredObservation& o) {
    return (static_cast<int>(o.fs) * 3 + static_cast<int>(o.motor)) * 2 + static_cast<int>(o.rm);
}

FactoredObservation decode_observation(ObservationId id) {
    if (id < 0 || id >= kNumFactoredObservations)
        throw std::out_of_range("decode_observation: not a factored observation id");
    FactoredObservation o;
    o.rm = static_cast<ReachMargin>(id % 2);
    id /= 2;
    o.motor = static_cast<MotorObs>(id % 3);
    id /= 3;
    o.fs = static_cast<FlightStatus>(id);
    return o;
}

std::string observation_name(ObservationId id) {
    if (id == kObsTerminal) return "TERMINAL";
    const FactoredObservation o = decode_observation(id);
    const char* motor = o.motor == MotorObs::MM0 ? "MM0" : (o.motor == MotorObs::MM1 ? "MM1" : "JF");
    return "(" + to_code(o.fs) + "," + motor + "," + to_code(o.rm) + ")";
}

ObservationModel build_observation_model(double p_o) {
    if (!(p_o >= 0.5 && p_o <= 1.0))
        throw std::invalid_argument("build_observation_model: p_o must be in [0.5, 1]");
    ObservationModel m;
    m.p_o = p_o;
    m.n_states = kNumStates;
    m.n_obs = kNumObservations;
    m.z.assign(static_cast<std::size_t>(kNumStates) * kNumObservations, 0.0);
    auto at = [&](int s, int o) -> double& {
        return m.z[static_cast<std::size_t>(s) * kNumObservations + o];
    };

    for (StateId s = 0; s < kNumStates; ++s) {
        if (is_absorbing(s)) {
            at(s, kObsTerminal) = 1.0;
            continue;
        }
        const FactoredState f = decode(s);
        // RM and motor corruption are independent flips to the complementary
        // binary value.
        const ReachMargin rm_true = f.rm;
        const ReachMargin rm_flip = f.rm == ReachMargin::RM1 ? ReachMargin::RM0 : ReachMargin::RM1;
        for (const auto& [rm_obs, p_rm] :
             {std::pair{rm_true, p_o}, std::pair{rm_flip, 1.0 - p_o}}) {
            if (p_rm == 0.0) continue;
            if (f.mh == MotorHealth::JamFault) {
                // A jam resolves deterministically; no margin is indicated.
                at(s, encode_observation({f.fs, MotorObs::JF, rm_obs})) += p_rm;
                continue;
            }
            const MotorObs mm_true = f.mm == MotorMargin::MM1 ? MotorObs::MM1 : MotorObs::MM0;
            const MotorObs mm_flip = f.mm == MotorMargin::MM1 ? MotorObs::MM0 : MotorObs::MM1;
            at(s, encode_observation({f.fs, mm_true, rm_obs})) += p_rm * p_o;
            if (p_o < 1.0) at(s, encode_observation({f.fs, mm_flip, rm_obs})) += p_rm * (1.0 - p_o);
        }
    }
    return m;
}

std::string to_json(const ObservationModel& m) {
    nlohmann::json j;
    j["p_o"] = m.p_o;
    j["n_states"] = m.n_states;
    j["n_obs"] = m.n_obs;
    nlohmann::json rows = nlohmann::json::array();
    for (int s = 0; s < m.n_states; ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int o = 0; o < m.n_obs; ++o) row.push_back(m.prob(s, o));
        rows.push_back(row);
    }
    j["z"] = rows;
    return j.dump(2) + "\n";
}

}  // namespace cma
