#pragma once

#include <optional>
#include <string>

#include "cma/alpha.hpp"
#include "cma/belief.hpp"
#include "cma/value_iteration.hpp"

namespace cma {

enum class PolicyKind { BaselineNoOp, TrueMdp, ObsMdp, MapMdp, Pomdp };

std::string to_string(PolicyKind k);
PolicyKind policy_from_string(const std::string& name);

// Per-episode mutable policy state. TrueMdp and the baseline ignore it;
// ObsMdp keeps only the battery health inferred from the initial belief;
// MapMdp and Pomdp track the belief.
struct PolicyContext {
    BatteryHealth bh = BatteryHealth::Good;
    Belief belief;
    Action last_action = Action::NoOp;
};

Action noop_action();

Action true_mdp_action(StateId s, const ValueFunction& vf);

// Treats the raw observation as the true state: motor_obs MM1 -> (NF, MM1),
// MM0 -> (SF, MM0), JF -> (JF, MM0); battery health comes from the context.
// Falls back to the best legal action by q-value if the policy's choice is
// illegal under the observed flight status.
Action obs_mdp_action(ObservationId o, const PolicyContext& ctx, const ValueFunction& vf);

// MDP action at the most-probable state of the belief, with the same
// legality fallback keyed on the MAP state's flight status.
Action map_mdp_action(const Belief& b, const ValueFunction& vf);

// Alpha-vector policy; if the maximizing alpha's action is illegal at the
// MAP state, the best legal alpha wins instead.
Action pomdp_action(const Belief& b, const AlphaSet& alphas);

}  // namespace cma
