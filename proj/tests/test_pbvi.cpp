#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <limits>

#include "cma/pbvi.hpp"

using namespace cma;

namespace {
const CmaModel kModel = build_cma_model(default_model_spec());
const ValueFunction kVf = value_iteration(kModel);

Belief random_belief(Rng& rng, int n) {
    Belief b;
    b.p.assign(n, 0.0);
    double sum = 0.0;
    for (double& v : b.p) {
        v = -std::log(1.0 - rng.next_double());
        sum += v;
    }
    for (double& v : b.p) v /= sum;
    return b;
}
}  // namespace

TEST_CASE("expansion adds the sampled successor of a singleton set") {
    const ObservationModel z = build_observation_model(1.0);
    BeliefSet bs;
    bs.points.push_back(initial_belief(BatteryHealth::Good));
    Rng rng(0);
    const BeliefSet grown = expand_beliefs(bs, kModel.transition, z, rng, 64);
    CHECK(grown.points.size() == 2);
    CHECK(grown.points[1].valid());
}

TEST_CASE("an already-covered successor does not grow the set") {
    // A fully deterministic self-loop model: the only successor belief equals
    // the current point, so nothing is added.
    TransitionModel t;
    t.n_states = 2;
    t.n_actions = 1;
    t.dense = {1, 0, 0, 1};
    t.rebuild_sparse();
    ObservationModel z;
    z.n_states = 2;
    z.n_obs = 2;
    z.z = {1, 0, 0, 1};
    BeliefSet bs;
    bs.points.push_back(Belief::delta(0, 2));
    Rng rng(1);
    const BeliefSet grown = expand_beliefs(bs, t, z, rng, 64);
    CHECK(grown.points.size() == 1);
}

TEST_CASE("expansion is deterministic under a fixed seed") {
    const ObservationModel z = build_observation_model(0.8);
    BeliefSet bs;
    for (BatteryHealth bh : {BatteryHealth::Good, BatteryHealth::Medium, BatteryHealth::Poor})
        bs.points.push_back(initial_belief(bh));
    Rng rng_a(17), rng_b(17);
    BeliefSet a = bs, b = bs;
    for (int round = 0; round < 4; ++round) {
        a = expand_beliefs(a, kModel.transition, z, rng_a, 128);
        b = expand_beliefs(b, kModel.transition, z, rng_b, 128);
    }
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].p == b.points[i].p);
}

TEST_CASE("identical configs produce identical alpha sets") {
    const ObservationModel z = build_observation_model(0.9);
    PbviConfig cfg;
    cfg.num_expansions = 4;
    cfg.backups_per_expansion = 5;
    const AlphaSet a = pbvi_solve(kModel, z, cfg);
    const AlphaSet b = pbvi_solve(kModel, z, cfg);
    REQUIRE(a.alphas.size() == b.alphas.size());
    for (std::size_t i = 0; i < a.alphas.size(); ++i) {
        CHECK(a.alphas[i].action == b.alphas[i].action);
        CHECK(a.alphas[i].values == b.alphas[i].values);
    }
}

TEST_CASE("solving an empty belief set is an error") {
    const ObservationModel z = build_observation_model(0.9);
    CHECK_THROWS_AS(pbvi_solve(kModel.transition, kModel.reward, kModel.legality, z, PbviConfig{},
                               BeliefSet{}),
                    std::invalid_argument);
}

TEST_CASE("PBVI value stays below the MDP upper bound everywhere") {
    const ObservationModel z = build_observation_model(0.8);
    PbviConfig cfg;
    cfg.num_expansions = 8;
    cfg.backups_per_expansion = 10;
    const AlphaSet set = pbvi_solve(kModel, z, cfg);
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const Belief b = random_belief(rng, kNumStates);
        double upper = 0.0;
        for (StateId s = 0; s < kNumStates; ++s) upper += b.p[s] * kVf.v[s];
        CHECK(set.value_at(b) <= upper + 1e-9);
    }
}

TEST_CASE("point values never decrease across backup sweeps") {
    const ObservationModel z = build_observation_model(0.8);
    BeliefSet points;
    for (BatteryHealth bh : {BatteryHealth::Good, BatteryHealth::Medium, BatteryHealth::Poor})
        points.points.push_back(initial_belief(bh));
    Rng rng(0);
    for (int i = 0; i < 5; ++i)
        points = expand_beliefs(points, kModel.transition, z, rng, 64);

    PbviConfig cfg;
    cfg.num_expansions = 1;  // fixed point set; watch successive solves deepen
    std::vector<double> previous(points.points.size(),
                                 -std::numeric_limits<double>::infinity());
    for (int sweeps : {1, 2, 4, 8, 16}) {
        cfg.backups_per_expansion = sweeps;
        const AlphaSet set = pbvi_solve(kModel.transition, kModel.reward, kModel.legality, z, cfg,
                                        points);
        for (std::size_t i = 0; i < points.points.size(); ++i) {
            const double v = set.value_at(points.points[i]);
            CHECK(v >= previous[i] - 1e-12);
            previous[i] = v;
        }
    }
}

TEST_CASE("pruning preserves values at every belief point") {
    const ObservationModel z = build_observation_model(0.9);
    BeliefSet points;
    for (BatteryHealth bh : {BatteryHealth::Good, BatteryHealth::Medium, BatteryHealth::Poor})
        points.points.push_back(initial_belief(bh));
    Rng rng(9);
    for (int i = 0; i < 4; ++i) points = expand_beliefs(points, kModel.transition, z, rng, 64);

    // Build an unpruned redundant set: QMDP alphas plus blind alphas.
    AlphaSet redundant = qmdp_alphas(kVf, kModel.legality);
    const AlphaSet blind = blind_lower_bound(kModel.transition, kModel.reward, 0.99);
    for (const auto& alpha : blind.alphas) redundant.alphas.push_back(alpha);

    const AlphaSet pruned = prune_alphas(redundant, points);
    CHECK(pruned.alphas.size() <= redundant.alphas.size());
    for (const auto& b : points.points)
        CHECK(pruned.value_at(b) == doctest::Approx(redundant.value_at(b)).epsilon(1e-15));
}

TEST_CASE("with perfect observations PBVI matches the MDP value at the start belief") {
    const ObservationModel z = build_observation_model(1.0);
    // Seed every state delta so the point set covers all reachable branches,
    // then expand into the mixed beliefs and iterate to tight convergence
    // (gamma^3000 * value range is far below the 1e-6 check).
    BeliefSet points;
    for (StateId s = 0; s < kNumStates; ++s) points.points.push_back(Belief::delta(s, kNumStates));
    PbviConfig cfg;
    cfg.num_expansions = 6;
    cfg.backups_per_expansion = 500;
    cfg.max_beliefs = 160;
    const AlphaSet set =
        pbvi_solve(kModel.transition, kModel.reward, kModel.legality, z, cfg, points);
    for (BatteryHealth bh : {BatteryHealth::Good, BatteryHealth::Medium, BatteryHealth::Poor}) {
        const Belief b0 = initial_belief(bh);
        const StateId s0 = map_state(b0);
        CHECK(set.value_at(b0) == doctest::Approx(kVf.v[s0]).epsilon(1e-6));
    }
}
