#include "doctest.h"

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "cma/sim.hpp"

using namespace cma;

namespace {
const ModelSpec kDefaults = default_model_spec();
const CmaModel kModel = build_cma_model(kDefaults);
const ValueFunction kVf = value_iteration(kModel);
const ObservationModel kPerfectObs = build_observation_model(1.0);
}  // namespace

TEST_CASE("deterministic rows sample their unique successor") {
    Rng rng(123);
    for (StateId s = 0; s < kNumFactoredStates; ++s)
        CHECK(sample_transition(rng, s, Action::Terminate, kModel.transition) ==
              kStateTerminated);
    CHECK(sample_transition(rng, kStateEnd, Action::NoOp, kModel.transition) == kStateEnd);
}

TEST_CASE("empirical motor-margin recovery frequency matches the table") {
    // P(MM0 -> MM1 | SF, NoOp) = 0.005, checked to 3 binomial sigma over 1e6 draws
    const StateId s = encode({FlightStatus::Nominal, MotorHealth::SpallFault, MotorMargin::MM0,
                              BatteryHealth::Good, ReachMargin::RM1});
    Rng rng(2024);
    const int n = 1000000;
    int recovered = 0;
    int survived = 0;
    for (int i = 0; i < n; ++i) {
        const StateId next = sample_transition(rng, s, Action::NoOp, kModel.transition);
        if (is_absorbing(next)) continue;
        ++survived;
        if (decode(next).mm == MotorMargin::MM1) ++recovered;
    }
    const double p_hat = static_cast<double>(recovered) / survived;
    const double sigma = std::sqrt(0.005 * 0.995 / survived);
    CHECK(std::abs(p_hat - 0.005) <= 3.0 * sigma);
}

TEST_CASE("empirical reach-margin flip rate matches the observation model") {
    const ObservationModel z = build_observation_model(0.8);
    const StateId s = encode({FlightStatus::Nominal, MotorHealth::NoFault, MotorMargin::MM1,
                              BatteryHealth::Good, ReachMargin::RM1});
    Rng rng(77);
    const int n = 1000000;
    int flipped = 0;
    for (int i = 0; i < n; ++i) {
        const ObservationId o = sample_observation(rng, s, Action::NoOp, z);
        if (decode_observation(o).rm == ReachMargin::RM0) ++flipped;
    }
    const double p_hat = static_cast<double>(flipped) / n;
    const double sigma = std::sqrt(0.2 * 0.8 / n);
    CHECK(std::abs(p_hat - 0.2) <= 3.0 * sigma);
}

TEST_CASE("perfect observations are the factored truth; absorbing emits TERMINAL") {
    Rng rng(5);
    const StateId s = encode({FlightStatus::EmergencyPractical, MotorHealth::SpallFault,
                              MotorMargin::MM0, BatteryHealth::Medium, ReachMargin::RM0});
    const ObservationId o = sample_observation(rng, s, Action::NoOp, kPerfectObs);
    const FactoredObservation f = decode_observation(o);
    CHECK(f.fs == FlightStatus::EmergencyPractical);
    CHECK(f.motor == MotorObs::MM0);
    CHECK(f.rm == ReachMargin::RM0);
    CHECK(sample_observation(rng, kStateComplete, Action::NoOp, kPerfectObs) == kObsTerminal);
}

TEST_CASE("forced completion ends the episode in one step") {
    ModelSpec spec = kDefaults;
    for (auto& [key, dist] : spec.failure.cpt) dist = {{"false", 1.0}};
    for (auto& [key, dist] : spec.complete.cpt) dist = {{"true", 1.0}};
    const CmaModel forced = build_cma_model(spec);
    SimConfig config;
    config.policy = PolicyKind::BaselineNoOp;
    config.n_episodes = 1;
    const SimOutcome out =
        run_episode(config, forced, forced.transition, kPerfectObs, {}, 0);
    CHECK(out.terminal == TerminalKind::Completed);
    CHECK(out.steps == 1);
    CHECK_FALSE(out.took_contingency);
    // nominal step reward + completion entry reward
    CHECK(out.cum_reward == doctest::Approx(0.368 + 0.163).epsilon(1e-12));
    CHECK(out.disc_reward == doctest::Approx(0.368 + 0.99 * 0.163).epsilon(1e-12));
}

TEST_CASE("terminating at the first step records a contingency and zero entry reward") {
    // A value function that always terminates.
    ValueFunction terminate_all = kVf;
    for (StateId s = 0; s < kNumStates; ++s)
        if (is_legal(s, Action::Terminate)) terminate_all.policy[s] = 1;
    SimConfig config;
    config.policy = PolicyKind::TrueMdp;
    PolicyAssets assets;
    assets.vf = &terminate_all;
    const SimOutcome out =
        run_episode(config, kModel, kModel.transition, kPerfectObs, assets, 0);
    CHECK(out.terminal == TerminalKind::Terminated);
    CHECK(out.steps == 1);
    CHECK(out.took_contingency);
    // R(s0, Terminate) = 0.286 + 0; R(T) = 0
    CHECK(out.cum_reward == doctest::Approx(0.286).epsilon(1e-12));
}

TEST_CASE("identical (config, episode index) reproduce identical outcomes") {
    SimConfig config;
    config.policy = PolicyKind::MapMdp;
    config.p_obs = 0.8;
    config.bh_cohort = BatteryHealth::Poor;
    const ObservationModel z = build_observation_model(0.8);
    PolicyAssets assets;
    assets.vf = &kVf;
    for (int episode : {0, 7, 4999}) {
        const SimOutcome a = run_episode(config, kModel, kModel.transition, z, assets, episode);
        const SimOutcome b = run_episode(config, kModel, kModel.transition, z, assets, episode);
        CHECK(a.terminal == b.terminal);
        CHECK(a.steps == b.steps);
        CHECK(a.cum_reward == b.cum_reward);
        CHECK(a.disc_reward == b.disc_reward);
        CHECK(a.p_minmax == b.p_minmax);
    }
}

TEST_CASE("batch aggregation is order-independent and rates partition") {
    SimConfig config;
    config.policy = PolicyKind::TrueMdp;
    config.n_episodes = 400;
    config.bh_cohort = BatteryHealth::Medium;
    PolicyAssets assets;
    assets.vf = &kVf;
    BatchResult batch = run_batch(config, kModel, kPerfectObs, assets);

    std::vector<SimOutcome> shuffled = batch.episodes;
    std::reverse(shuffled.begin(), shuffled.end());
    const MetricsSummary again = summarize(shuffled);
    CHECK(again.completion_rate.value == batch.summary.completion_rate.value);
    CHECK(again.cum_reward.mean == doctest::Approx(batch.summary.cum_reward.mean).epsilon(1e-15));

    const MetricsSummary& s = batch.summary;
    CHECK(s.completion_rate.value + s.failure_rate.value + s.terminated_rate.value +
              s.horizon_rate.value ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.safety_rate.value == doctest::Approx(1.0 - s.failure_rate.value).epsilon(1e-12));
    CHECK(s.true_success_rate.value <= s.completion_rate.value);
}

TEST_CASE("binomial SEM formula") {
    SimConfig config;
    config.policy = PolicyKind::BaselineNoOp;
    config.n_episodes = 250;
    config.bh_cohort = BatteryHealth::Good;
    BatchResult batch = run_batch(config, kModel, kPerfectObs, {});
    const RateStat& r = batch.summary.completion_rate;
    CHECK(r.sem ==
          doctest::Approx(std::sqrt(r.value * (1.0 - r.value) / 250.0)).epsilon(1e-12));
    CHECK(r.ci95_hi - r.value == doctest::Approx(1.96 * r.sem).epsilon(1e-12));
}

TEST_CASE("all-completed batches have unit true-success and zero failure") {
    ModelSpec spec = kDefaults;
    for (auto& [key, dist] : spec.failure.cpt) dist = {{"false", 1.0}};
    for (auto& [key, dist] : spec.complete.cpt) dist = {{"true", 1.0}};
    const CmaModel forced = build_cma_model(spec);
    SimConfig config;
    config.policy = PolicyKind::BaselineNoOp;
    config.n_episodes = 50;
    BatchResult batch = run_batch(config, forced, kPerfectObs, {});
    CHECK(batch.summary.true_success_rate.value == 1.0);
    CHECK(batch.summary.failure_rate.value == 0.0);
    CHECK(batch.summary.completion_rate.value == 1.0);
}

TEST_CASE("optimal policy dominates the baseline on discounted reward (poor battery)") {
    SimConfig config;
    config.n_episodes = 5000;
    config.bh_cohort = BatteryHealth::Poor;
    config.policy = PolicyKind::TrueMdp;
    PolicyAssets assets;
    assets.vf = &kVf;
    const BatchResult mdp = run_batch(config, kModel, kPerfectObs, assets);
    config.policy = PolicyKind::BaselineNoOp;
    const BatchResult noop = run_batch(config, kModel, kPerfectObs, {});
    CHECK(mdp.summary.disc_reward.mean >=
          noop.summary.disc_reward.mean -
              2.0 * (mdp.summary.disc_reward.sem + noop.summary.disc_reward.sem));
}

TEST_CASE("diffuse battery-health prior tracks a belief over all three cohorts") {
    SimConfig config;
    config.policy = PolicyKind::MapMdp;
    config.diffuse_bh_prior = true;
    config.bh_cohort = BatteryHealth::Poor;
    config.n_episodes = 50;
    config.p_obs = 0.9;
    const ObservationModel z = build_observation_model(0.9);
    PolicyAssets assets;
    assets.vf = &kVf;
    BatchResult batch = run_batch(config, kModel, z, assets);
    CHECK(batch.summary.n == 50);
    // battery health is never observed, so the belief max cannot exceed the
    // prior weight of a single cohort early on
    for (const auto& o : batch.episodes) {
        REQUIRE(o.p_minmax.has_value());
        CHECK(*o.p_minmax <= 1.0 / 3.0 + 1e-9);
    }
}

TEST_CASE("spall-onset stress override only affects the simulated truth") {
    const TransitionModel stressed = stressed_transition(kDefaults, 0.5);
    // NF row: onset probability 0.5 marginalized over survivors
    const StateId s = encode({FlightStatus::Nominal, MotorHealth::NoFault, MotorMargin::MM1,
                              BatteryHealth::Good, ReachMargin::RM1});
    double survived = 0.0;
    double sf = 0.0;
    for (StateId to = 0; to < kNumFactoredStates; ++to) {
        const double p = stressed.prob(0, s, to);
        survived += p;
        if (decode(to).mh == MotorHealth::SpallFault) sf += p;
    }
    CHECK(sf / survived == doctest::Approx(0.5).epsilon(1e-12));

    SimConfig config;
    config.policy = PolicyKind::MapMdp;
    config.n_episodes = 200;
    config.p_obs = 0.9;
    config.sf_onset_override = 0.5;
    const ObservationModel z = build_observation_model(0.9);
    PolicyAssets assets;
    assets.vf = &kVf;
    // Belief updates run against the nominal model while sampling from the
    // stressed one; episodes must still complete without inconsistency.
    BatchResult batch = run_batch(config, kModel, z, assets, &stressed);
    CHECK(batch.summary.n == 200);
}
