#include "cma/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cma {

std::string to_string(TerminalKind k) {
    switch (k) {
        case TerminalKind::Completed: return "completed";
        case TerminalKind::Terminated: return "terminated";
        case TerminalKind::Failed: return "failed";
        case TerminalKind::HorizonReached: return "horizon";
    }
    return "?";
}

StateId sample_transition(Rng& rng, StateId s, Action a, const TransitionModel& t) {
    const double u = rng.next_double();
    double acc = 0.0;
    StateId last = -1;
    for (const auto& e : t.row(static_cast<int>(a), s)) {
        acc += e.p;
        last = e.to;
        if (u < acc) return e.to;
    }
    return last;  // rounding residue lands in the top bucket
}

ObservationId sample_observation(Rng& rng, StateId next_state, Action a,
                                 const ObservationModel& z) {
    const double u = rng.next_double();
    double acc = 0.0;
    ObservationId last = -1;
    for (int o = 0; o < z.n_obs; ++o) {
        const double p = z.prob(static_cast<int>(a), next_state, o);
        if (p <= 0.0) continue;
        acc += p;
        last = o;
        if (u < acc) return o;
    }
    return last;
}

namespace {

TerminalKind terminal_kind_of(StateId s) {
    switch (absorbing_kind(s)) {
        case AbsorbingKind::Complete: return TerminalKind::Completed;
        case AbsorbingKind::Terminated: return TerminalKind::Terminated;
        case AbsorbingKind::Failed: return TerminalKind::Failed;
        default: throw std::logic_error("episode entered E directly");
    }
}

bool tracks_belief(PolicyKind k) { return k == PolicyKind::MapMdp || k == PolicyKind::Pomdp; }

}  // namespace

SimOutcome run_episode(const SimConfig& config, const CmaModel& model,
                       const TransitionModel& truth, const ObservationModel& obs_model,
                       const PolicyAssets& assets, int episode_index) {
    if ((config.policy == PolicyKind::TrueMdp || config.policy == PolicyKind::ObsMdp ||
         config.policy == PolicyKind::MapMdp) &&
        assets.vf == nullptr)
        throw std::invalid_argument("run_episode: policy requires a solved value function");
    if (config.policy == PolicyKind::Pomdp && assets.alphas == nullptr)
        throw std::invalid_argument("run_episode: pomdp policy requires an alpha set");

    Rng rng = Rng::stream(config.base_seed, static_cast<std::uint64_t>(episode_index));

    SimOutcome out;
    out.seed = config.base_seed ^ static_cast<std::uint64_t>(episode_index);

    PolicyContext ctx;
    ctx.bh = config.bh_cohort;
    ctx.belief = config.diffuse_bh_prior ? initial_belief_diffuse_bh()
                                         : initial_belief(config.bh_cohort);

    StateId s = encode({FlightStatus::Nominal, MotorHealth::NoFault, MotorMargin::MM1,
                        config.bh_cohort, ReachMargin::RM1});
    ObservationId last_obs = -1;  // no observation before the first action

    double minmax = 1.0;
    if (tracks_belief(config.policy)) {
        double maxp = 0.0;
        for (double v : ctx.belief.p) maxp = std::max(maxp, v);
        minmax = maxp;
    }

    double discount_t = 1.0;
    for (int step = 0; step < config.horizon; ++step) {
        Action a = Action::NoOp;
        switch (config.policy) {
            case PolicyKind::BaselineNoOp: a = noop_action(); break;
            case PolicyKind::TrueMdp: a = true_mdp_action(s, *assets.vf); break;
            case PolicyKind::ObsMdp:
                a = last_obs < 0 ? true_mdp_action(map_state(ctx.belief), *assets.vf)
                                 : obs_mdp_action(last_obs, ctx, *assets.vf);
                break;
            case PolicyKind::MapMdp: a = map_mdp_action(ctx.belief, *assets.vf); break;
            case PolicyKind::Pomdp: a = pomdp_action(ctx.belief, *assets.alphas); break;
        }
        if (!is_legal(s, a))
            throw std::logic_error("policy emitted illegal action " + to_code(a) + " at " +
                                   state_name(s));
        if (a != Action::NoOp) out.took_contingency = true;
        ctx.last_action = a;

        const double r = model.reward.at(s, static_cast<int>(a));
        out.cum_reward += r;
        out.disc_reward += discount_t * r;
        discount_t *= config.discount;

        const StateId next = sample_transition(rng, s, a, truth);
        out.steps = step + 1;
        if (is_absorbing(next)) {
            // One-time entry reward of C/T/FL.
            const double r_abs = model.reward.at(next, 0);
            out.cum_reward += r_abs;
            out.disc_reward += discount_t * r_abs;
            out.terminal = terminal_kind_of(next);
            if (tracks_belief(config.policy)) out.p_minmax = minmax;
            return out;
        }

        const ObservationId o = sample_observation(rng, next, a, obs_model);
        last_obs = o;
        if (tracks_belief(config.policy)) {
            ctx.belief = belief_update(ctx.belief, static_cast<int>(a), o, model.transition,
                                       obs_model);
            double maxp = 0.0;
            for (double v : ctx.belief.p) maxp = std::max(maxp, v);
            minmax = std::min(minmax, maxp);
        }
        s = next;
    }
    out.terminal = TerminalKind::HorizonReached;
    if (tracks_belief(config.policy)) out.p_minmax = minmax;
    return out;
}

TransitionModel stressed_transition(const ModelSpec& spec, double sf_onset) {
    if (!(sf_onset >= 0.0 && sf_onset <= 1.0))
        throw std::invalid_argument("stressed_transition: onset probability out of [0,1]");
    ModelSpec stressed = spec;
    std::map<std::string, double> row;
    if (sf_onset < 1.0) row["NF"] = 1.0 - sf_onset;
    if (sf_onset > 0.0) row["SF"] = sf_onset;
    stressed.motor_health.cpt["NF"] = row;
    return build_transition(stressed);
}

BatchResult run_batch(const SimConfig& config, const CmaModel& model,
                      const ObservationModel& obs_model, const PolicyAssets& assets,
                      const TransitionModel* truth_override) {
    if (config.n_episodes < 1) throw std::invalid_argument("run_batch: n_episodes must be >= 1");
    if (config.horizon < 1) throw std::invalid_argument("run_batch: horizon must be >= 1");
    const TransitionModel& truth = truth_override ? *truth_override : model.transition;
    BatchResult result;
    result.episodes.reserve(config.n_episodes);
    for (int i = 0; i < config.n_episodes; ++i)
        result.episodes.push_back(run_episode(config, model, truth, obs_model, assets, i));
    result.summary = summarize(result.episodes);
    return result;
}

namespace {

RateStat rate_stat(int count, int n) {
    RateStat r;
    r.value = static_cast<double>(count) / n;
    r.sem = std::sqrt(r.value * (1.0 - r.value) / n);
    r.ci95_lo = r.value - 1.96 * r.sem;
    r.ci95_hi = r.value + 1.96 * r.sem;
    return r;
}

// Sorts before accumulating so the result is bit-identical under any episode
// execution order.
MeanStat mean_stat(std::vector<double> xs) {
    MeanStat m;
    if (xs.empty()) return m;
    std::sort(xs.begin(), xs.end());
    const int n = static_cast<int>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / n;
    if (n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.stddev = std::sqrt(ss / (n - 1));
        m.sem = m.stddev / std::sqrt(static_cast<double>(n));
    }
    m.ci95_lo = m.mean - 1.96 * m.sem;
    m.ci95_hi = m.mean + 1.96 * m.sem;
    return m;
}

}  // namespace

MetricsSummary summarize(const std::vector<SimOutcome>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("summarize: no outcomes");
    MetricsSummary s;
    s.n = static_cast<int>(outcomes.size());
    int completed = 0, true_success = 0, failed = 0, terminated = 0, horizon = 0;
    std::vector<double> cum, disc, per_step, pmm;
    cum.reserve(s.n);
    disc.reserve(s.n);
    per_step.reserve(s.n);
    for (const auto& o : outcomes) {
        switch (o.terminal) {
            case TerminalKind::Completed:
                ++completed;
                if (!o.took_contingency) ++true_success;
                break;
            case TerminalKind::Failed: ++failed; break;
            case TerminalKind::Terminated: ++terminated; break;
            case TerminalKind::HorizonReached: ++horizon; break;
        }
        cum.push_back(o.cum_reward);
        disc.push_back(o.disc_reward);
        per_step.push_back(o.steps > 0 ? o.cum_reward / o.steps : 0.0);
        if (o.p_minmax) {
            pmm.push_back(*o.p_minmax);
            s.p_minmax_min = std::min(s.p_minmax_min, *o.p_minmax);
        }
    }
    s.completion_rate = rate_stat(completed, s.n);
    s.true_success_rate = rate_stat(true_success, s.n);
    s.failure_rate = rate_stat(failed, s.n);
    s.safety_rate = rate_stat(s.n - failed, s.n);
    s.terminated_rate = rate_stat(terminated, s.n);
    s.horizon_rate = rate_stat(horizon, s.n);
    s.cum_reward = mean_stat(cum);
    s.disc_reward = mean_stat(disc);
    s.reward_per_step = mean_stat(per_step);
    s.p_minmax = mean_stat(pmm);
    s.p_minmax_n = static_cast<int>(pmm.size());
    return s;
}

}  // namespace cma
