#include "cma/policies.hpp"

#include <limits>
#include <stdexcept>

namespace cma {

std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::BaselineNoOp: return "noop";
        case PolicyKind::TrueMdp: return "true_mdp";
        case PolicyKind::ObsMdp: return "obs_mdp";
        case PolicyKind::MapMdp: return "map_mdp";
        case PolicyKind::Pomdp: return "pomdp";
    }
    return "?";
}

PolicyKind policy_from_string(const std::string& name) {
    if (name == "noop") return PolicyKind::BaselineNoOp;
    if (name == "true_mdp") return PolicyKind::TrueMdp;
    if (name == "obs_mdp") return PolicyKind::ObsMdp;
    if (name == "map_mdp") return PolicyKind::MapMdp;
    if (name == "pomdp") return PolicyKind::Pomdp;
    throw std::invalid_argument("unknown policy '" + name +
                                "' (expected noop|true_mdp|obs_mdp|map_mdp|pomdp)");
}

Action noop_action() { return Action::NoOp; }

Action true_mdp_action(StateId s, const ValueFunction& vf) {
    return static_cast<Action>(vf.policy[s]);
}

namespace {

// Policy action at `s`, replaced by the best legal action (by q-value) when
// the nominal choice is illegal at `s`.
Action mdp_action_with_fallback(StateId s, const ValueFunction& vf) {
    const Action a = static_cast<Action>(vf.policy[s]);
    if (is_legal(s, a)) return a;
    Action best = Action::NoOp;
    double best_q = -std::numeric_limits<double>::infinity();
    for (Action candidate : legal_actions(s)) {
        const double q = vf.q_at(s, static_cast<int>(candidate));
        if (q > best_q) {
            best_q = q;
            best = candidate;
        }
    }
    return best;
}

}  // namespace

Action obs_mdp_action(ObservationId o, const PolicyContext& ctx, const ValueFunction& vf) {
    if (o == kObsTerminal) throw std::invalid_argument("obs_mdp_action: TERMINAL observation");
    const FactoredObservation obs = decode_observation(o);
    FactoredState presumed;
    presumed.fs = obs.fs;
    presumed.bh = ctx.bh;
    presumed.rm = obs.rm;
    switch (obs.motor) {
        case MotorObs::MM1:
            presumed.mh = MotorHealth::NoFault;
            presumed.mm = MotorMargin::MM1;
            break;
        case MotorObs::MM0:
            presumed.mh = MotorHealth::SpallFault;
            presumed.mm = MotorMargin::MM0;
            break;
        case MotorObs::JF:
            presumed.mh = MotorHealth::JamFault;
            presumed.mm = MotorMargin::MM0;
            break;
    }
    return mdp_action_with_fallback(encode(presumed), vf);
}

Action map_mdp_action(const Belief& b, const ValueFunction& vf) {
    return mdp_action_with_fallback(map_state(b), vf);
}

Action pomdp_action(const Belief& b, const AlphaSet& alphas) {
    const Action nominal = static_cast<Action>(alpha_policy_action(alphas, b));
    const StateId map = map_state(b);
    if (is_legal(map, nominal)) return nominal;
    // Best legal alpha at b.
    int best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas.alphas.size(); ++i) {
        const auto& alpha = alphas.alphas[i];
        if (!is_legal(map, static_cast<Action>(alpha.action))) continue;
        double v = 0.0;
        for (int s = 0; s < b.size(); ++s) v += alpha.values[s] * b.p[s];
        if (v > best_value) {
            best_value = v;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) return Action::NoOp;
    return static_cast<Action>(alphas.alphas[best].action);
}

}  // namespace cma
