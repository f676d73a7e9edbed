#include "doctest.h"

#include <stdexcept>

#include "cma/alpha.hpp"

using namespace cma;

namespace {
const CmaModel kModel = build_cma_model(default_model_spec());
const ValueFunction kVf = value_iteration(kModel);
}  // namespace

TEST_CASE("QMDP produces one alpha per action") {
    const AlphaSet set = qmdp_alphas(kVf, kModel.legality);
    REQUIRE(set.alphas.size() == 4);
    for (int a = 0; a < 4; ++a) CHECK(set.alphas[a].action == a);
}

TEST_CASE("QMDP at a delta belief recovers the MDP action and value") {
    const AlphaSet set = qmdp_alphas(kVf, kModel.legality);
    for (StateId s = 0; s < kNumStates; ++s) {
        const Belief b = Belief::delta(s, kNumStates);
        CHECK(alpha_policy_action(set, b) == kVf.policy[s]);
        CHECK(set.value_at(b) == doctest::Approx(kVf.v[s]).epsilon(1e-12));
    }
}

TEST_CASE("illegal entries are replaced by the NoOp value") {
    const AlphaSet set = qmdp_alphas(kVf, kModel.legality);
    const StateId el_asap = encode({FlightStatus::EmergencyAsap, MotorHealth::NoFault,
                                    MotorMargin::MM1, BatteryHealth::Good, ReachMargin::RM1});
    CHECK(set.alphas[static_cast<int>(Action::LandPractical)].values[el_asap] ==
          kVf.q_at(el_asap, 0));
}

TEST_CASE("alpha policy tie-breaks toward the lower index") {
    AlphaSet set;
    AlphaVector a0{{1.0, 1.0}, 2};
    AlphaVector a1{{1.0, 1.0}, 0};
    set.alphas = {a0, a1};
    Belief b;
    b.p = {0.5, 0.5};
    CHECK(set.best_alpha(b) == 0);
    CHECK(alpha_policy_action(set, b) == 2);

    AlphaSet single;
    single.alphas = {a1};
    CHECK(alpha_policy_action(single, b) == 0);
}
