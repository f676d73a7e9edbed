#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cma/alpha.hpp"
#include "cma/belief.hpp"
#include "cma/policies.hpp"
#include "cma/rng.hpp"

namespace cma {

enum class TerminalKind { Completed, Terminated, Failed, HorizonReached };

std::string to_string(TerminalKind k);

struct SimConfig {
    int horizon = 100;
    double discount = 0.99;
    int n_episodes = 5000;
    std::uint64_t base_seed = 0;
    double p_obs = 0.9;
    BatteryHealth bh_cohort = BatteryHealth::Good;
    PolicyKind policy = PolicyKind::TrueMdp;
    // Battery health unknown at start: belief-tracking policies initialize
    // from the diffuse-BH prior instead of the cohort delta.
    bool diffuse_bh_prior = false;
    // Stress mode mirroring the high-fidelity protocol: overrides the
    // per-step spall-onset probability of the ground-truth simulator only
    // (policies keep the nominal model).
    std::optional<double> sf_onset_override;
};

struct SimOutcome {
    TerminalKind terminal = TerminalKind::HorizonReached;
    bool took_contingency = false;
    int steps = 0;
    double cum_reward = 0.0;       // undiscounted
    double disc_reward = 0.0;      // discounted at config.discount
    std::optional<double> p_minmax;  // belief-tracking policies only
    std::uint64_t seed = 0;
};

struct RateStat {
    double value = 0.0;
    double sem = 0.0;   // sqrt(p(1-p)/n)
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
};

struct MeanStat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
    double sem = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
};

struct MetricsSummary {
    int n = 0;
    RateStat completion_rate;
    RateStat true_success_rate;  // completed with no contingency action
    RateStat failure_rate;
    RateStat safety_rate;        // 1 - failure_rate
    RateStat terminated_rate;
    RateStat horizon_rate;
    MeanStat cum_reward;
    MeanStat disc_reward;
    MeanStat reward_per_step;    // per-episode cum_reward / steps
    MeanStat p_minmax;           // over episodes that tracked a belief
    double p_minmax_min = 1.0;
    int p_minmax_n = 0;
};

// Solved assets consumed by the policies; alphas are only needed for Pomdp.
struct PolicyAssets {
    const ValueFunction* vf = nullptr;
    const AlphaSet* alphas = nullptr;
};

// Next state drawn from P[a][s][.] by inverse CDF over ascending state index.
StateId sample_transition(Rng& rng, StateId s, Action a, const TransitionModel& t);

// Observation drawn from z[a][s'][.] by inverse CDF.
ObservationId sample_observation(Rng& rng, StateId next_state, Action a,
                                 const ObservationModel& z);

// One seeded episode. `truth` is the ground-truth simulator model; policies
// and belief updates use `model`/`obs_model` (identical unless a stress
// override is active). The per-episode RNG stream is derived from
// (config.base_seed, episode_index), so episodes are order-independent.
SimOutcome run_episode(const SimConfig& config, const CmaModel& model,
                       const TransitionModel& truth, const ObservationModel& obs_model,
                       const PolicyAssets& assets, int episode_index);

struct BatchResult {
    MetricsSummary summary;
    std::vector<SimOutcome> episodes;
};

// `truth_override`, when non-null, replaces the ground-truth simulator
// transition (used for the spall-onset stress mode); policies keep `model`.
BatchResult run_batch(const SimConfig& config, const CmaModel& model,
                      const ObservationModel& obs_model, const PolicyAssets& assets,
                      const TransitionModel* truth_override = nullptr);

// Rebuilds the transition with the motor-health NF row replaced by the given
// per-step spall-onset probability.
TransitionModel stressed_transition(const ModelSpec& spec, double sf_onset);

MetricsSummary summarize(const std::vector<SimOutcome>& outcomes);

}  // namespace cma
