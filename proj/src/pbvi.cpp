#include "cma/pbvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cma {

namespace {

// Inverse-CDF draw over a dense probability vector (ascending index).
int sample_index(Rng& rng, const std::vector<double>& p) {
    const double u = rng.next_double();
    double acc = 0.0;
    int last = -1;
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        if (p[i] <= 0.0) continue;
        acc += p[i];
        last = i;
        if (u < acc) return i;
    }
    return last;  // u fell into rounding residue; take the top bucket
}

int sample_row(Rng& rng, std::span<const TransitionModel::Entry> row) {
    const double u = rng.next_double();
    double acc = 0.0;
    int last = -1;
    for (const auto& e : row) {
        acc += e.p;
        last = e.to;
        if (u < acc) return e.to;
    }
    return last;
}

int sample_obs(Rng& rng, const ObservationModel& z, int next_state) {
    const double u = rng.next_double();
    double acc = 0.0;
    int last = -1;
    for (int o = 0; o < z.n_obs; ++o) {
        const double p = z.prob(next_state, o);
        if (p <= 0.0) continue;
        acc += p;
        last = o;
        if (u < acc) return o;
    }
    return last;
}

double l1_distance(const Belief& a, const Belief& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.p.size(); ++i) d += std::abs(a.p[i] - b.p[i]);
    return d;
}

double min_distance_to_set(const Belief& candidate, const std::vector<Belief>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : points) best = std::min(best, l1_distance(candidate, b));
    return best;
}

// Early-exit proximity test, scanning newest points first (trajectory
// locality makes the nearest point a recent one).
bool near_set(const Belief& candidate, const std::vector<Belief>& points, double tol) {
    for (auto it = points.rbegin(); it != points.rend(); ++it) {
        double d = 0.0;
        for (std::size_t s = 0; s < candidate.p.size(); ++s) {
            d += std::abs(candidate.p[s] - it->p[s]);
            if (d > tol) break;
        }
        if (d <= tol) return true;
    }
    return false;
}

std::vector<int> support_of(const Belief& b) {
    std::vector<int> support;
    for (int s = 0; s < b.size(); ++s)
        if (b.p[s] > 0.0) support.push_back(s);
    return support;
}

}  // namespace

AlphaSet blind_lower_bound(const TransitionModel& t, const RewardModel& r, double discount) {
    AlphaSet set;
    for (int a = 0; a < t.n_actions; ++a) {
        AlphaVector alpha;
        alpha.action = a;
        alpha.values.assign(t.n_states, 0.0);
        // Fixed point of the always-a policy evaluation.
        for (int it = 0; it < 100000; ++it) {
            double residual = 0.0;
            std::vector<double> next(t.n_states);
            for (int s = 0; s < t.n_states; ++s) {
                double expected = 0.0;
                for (const auto& e : t.row(a, s)) expected += e.p * alpha.values[e.to];
                next[s] = r.at(s, a) + discount * expected;
                residual = std::max(residual, std::abs(next[s] - alpha.values[s]));
            }
            alpha.values = std::move(next);
            if (residual <= 1e-13) break;
        }
        set.alphas.push_back(std::move(alpha));
    }
    return set;
}

BeliefSet expand_beliefs(const BeliefSet& bs, const TransitionModel& t, const ObservationModel& z,
                         Rng& rng, int max_beliefs) {
    BeliefSet out = bs;
    const std::size_t original = bs.points.size();
    for (std::size_t i = 0; i < original; ++i) {
        if (static_cast<int>(out.points.size()) >= max_beliefs) break;
        const Belief& b = bs.points[i];
        double best_distance = 0.0;
        Belief best_candidate;
        for (int a = 0; a < t.n_actions; ++a) {
            const int s = sample_index(rng, b.p);
            const int s2 = sample_row(rng, t.row(a, s));
            const int o = sample_obs(rng, z, s2);
            if (o == kObsTerminal) continue;
            Belief candidate = belief_update(b, a, o, t, z);
            const double d = min_distance_to_set(candidate, out.points);
            if (d > best_distance) {
                best_distance = d;
                best_candidate = std::move(candidate);
            }
        }
        if (best_distance > 0.0) out.points.push_back(std::move(best_candidate));
    }
    return out;
}

AlphaSet prune_alphas(const AlphaSet& set, const BeliefSet& points) {
    const std::size_t n = set.alphas.size();
    if (n <= 1) return set;

    // Belief-point dominance: keep each point's winner (ties to lowest index).
    std::vector<bool> winner(n, false);
    for (const Belief& b : points.points) winner[set.best_alpha(b)] = true;
    std::vector<int> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (!winner[i]) continue;
        bool duplicate = false;
        for (int j : kept) {
            if (set.alphas[j].values == set.alphas[i].values) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) kept.push_back(static_cast<int>(i));
    }

    // Pointwise dominance among the survivors. A dominated vector never
    // contributes to the max at any belief, so values are unchanged.
    auto dominates = [&](int hi, int lo) {
        const auto& a = set.alphas[hi].values;
        const auto& b = set.alphas[lo].values;
        for (std::size_t s = 0; s < a.size(); ++s)
            if (a[s] < b[s]) return false;
        return true;
    };
    AlphaSet out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < kept.size() && !dominated; ++j)
            if (j != i) dominated = dominates(kept[j], kept[i]) && !dominates(kept[i], kept[j]);
        if (!dominated) out.alphas.push_back(set.alphas[kept[i]]);
    }
    if (out.alphas.empty()) out.alphas.push_back(set.alphas[0]);
    return out;
}

namespace {

// One synchronous point-based backup sweep. Returns the union of the previous
// set and the per-point backups, pruned; `improvement` reports the largest
// value gain over the sweep at any point.
AlphaSet backup_sweep(const AlphaSet& gamma, const BeliefSet& points,
                      const std::vector<std::vector<int>>& supports, const TransitionModel& t,
                      const RewardModel& r, const ObservationModel& z, double discount,
                      double* improvement) {
    const int n = t.n_states;
    const int na = t.n_actions;
    const int no = z.n_obs;
    const std::size_t n_alpha = gamma.alphas.size();

    // Back-projections g[alpha][a][o](s) = sum_s' P[a][s][s'] z(s',o) alpha(s').
    std::vector<double> g(n_alpha * na * no * n, 0.0);
    auto g_at = [&](std::size_t alpha, int a, int o) {
        return g.data() + ((alpha * na + a) * no + o) * n;
    };
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
        const auto& alpha = gamma.alphas[ai].values;
        for (int a = 0; a < na; ++a) {
            for (int s = 0; s < n; ++s) {
                for (const auto& e : t.row(a, s)) {
                    const double pa = e.p * alpha[e.to];
                    const double* zrow = &z.z[static_cast<std::size_t>(e.to) * no];
                    double* base = g_at(ai, a, 0);
                    for (int o = 0; o < no; ++o) {
                        if (zrow[o] > 0.0) base[static_cast<std::size_t>(o) * n + s] += pa * zrow[o];
                    }
                }
            }
        }
    }

    *improvement = 0.0;
    AlphaSet result = gamma;
    std::vector<double> predicted(n);
    std::vector<double> obs_mass(no);
    for (std::size_t bi = 0; bi < points.points.size(); ++bi) {
        const Belief& b = points.points[bi];
        const auto& support = supports[bi];
        AlphaVector best_alpha;
        double best_value = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < na; ++a) {
            // Observations impossible under (b, a) contribute nothing at b;
            // their branch keeps alpha 0 without searching.
            std::fill(predicted.begin(), predicted.end(), 0.0);
            for (int s : support)
                for (const auto& e : t.row(a, s)) predicted[e.to] += b.p[s] * e.p;
            std::fill(obs_mass.begin(), obs_mass.end(), 0.0);
            for (int s2 = 0; s2 < n; ++s2) {
                if (predicted[s2] == 0.0) continue;
                const double* zrow = &z.z[static_cast<std::size_t>(s2) * no];
                for (int o = 0; o < no; ++o) obs_mass[o] += predicted[s2] * zrow[o];
            }

            AlphaVector candidate;
            candidate.action = a;
            candidate.values.assign(n, 0.0);
            for (int s = 0; s < n; ++s) candidate.values[s] = r.at(s, a);
            for (int o = 0; o < no; ++o) {
                std::size_t best_i = 0;
                if (obs_mass[o] > 0.0) {
                    double best_dot = -std::numeric_limits<double>::infinity();
                    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
                        const double* gv = g_at(ai, a, o);
                        double d = 0.0;
                        for (int s : support) d += gv[s] * b.p[s];
                        if (d > best_dot) {
                            best_dot = d;
                            best_i = ai;
                        }
                    }
                }
                const double* gv = g_at(best_i, a, o);
                for (int s = 0; s < n; ++s) candidate.values[s] += discount * gv[s];
            }
            double value = 0.0;
            for (int s : support) value += candidate.values[s] * b.p[s];
            if (value > best_value) {
                best_value = value;
                best_alpha = std::move(candidate);
            }
        }
        const double before = gamma.value_at(b);
        if (best_value > before) *improvement = std::max(*improvement, best_value - before);
        result.alphas.push_back(std::move(best_alpha));
    }
    return prune_alphas(result, points);
}

}  // namespace

namespace {

// Sampled on-policy trajectories (greedy MDP action at the MAP state) from
// each start point; every visited belief sufficiently far from the set joins
// it. This covers the belief manifold the evaluation actually visits, which
// farthest-point expansion alone reaches too slowly.
void harvest_reachable_beliefs(BeliefSet& points, const TransitionModel& t, const RewardModel& r,
                               const LegalityMask& legality, const ObservationModel& z,
                               const PbviConfig& config) {
    SolverConfig solver;
    solver.discount = config.discount;
    const ValueFunction vf = value_iteration(t, r, legality, solver);
    const std::size_t n_starts = points.points.size();
    for (std::size_t start = 0; start < n_starts; ++start) {
        for (int ep = 0; ep < config.harvest_episodes; ++ep) {
            if (static_cast<int>(points.points.size()) >= config.max_beliefs) return;
            Rng rng = Rng::stream(config.seed ^ (0x9E3779B97F4A7C15ULL * (start + 1)),
                                  static_cast<std::uint64_t>(ep));
            Belief b = points.points[start];
            int s = sample_index(rng, b.p);
            for (int step = 0; step < config.harvest_horizon; ++step) {
                const int map = map_state(b);
                const int a = vf.policy[map];
                const int s2 = sample_row(rng, t.row(a, s));
                // Episodes of the 112-state model end at absorption; generic
                // toy models just run out the horizon.
                if (t.n_states == kNumStates && is_absorbing(s2)) break;
                const int o = sample_obs(rng, z, s2);
                b = belief_update(b, a, o, t, z);
                s = s2;
                if (!near_set(b, points.points, config.dedupe_tol)) {
                    points.points.push_back(b);
                    if (static_cast<int>(points.points.size()) >= config.max_beliefs) return;
                }
            }
        }
    }
}

}  // namespace

AlphaSet pbvi_solve(const TransitionModel& t, const RewardModel& r, const LegalityMask& legality,
                    const ObservationModel& z, const PbviConfig& config,
                    const BeliefSet& initial_points) {
    if (initial_points.points.empty())
        throw std::invalid_argument("pbvi_solve: empty initial belief set");
    for (const auto& b : initial_points.points)
        if (!b.valid()) throw std::invalid_argument("pbvi_solve: invalid belief point");

    Rng rng(config.seed);
    BeliefSet points = initial_points;
    if (config.harvest_episodes > 0) harvest_reachable_beliefs(points, t, r, legality, z, config);
    AlphaSet gamma = blind_lower_bound(t, r, config.discount);

    for (int e = 0; e < config.num_expansions; ++e) {
        if (e > 0 && static_cast<int>(points.points.size()) < config.max_beliefs)
            points = expand_beliefs(points, t, z, rng, config.max_beliefs);
        std::vector<std::vector<int>> supports;
        supports.reserve(points.points.size());
        for (const auto& b : points.points) supports.push_back(support_of(b));
        for (int k = 0; k < config.backups_per_expansion; ++k) {
            double improvement = 0.0;
            gamma = backup_sweep(gamma, points, supports, t, r, z, config.discount, &improvement);
            // Stopping once sweeps gain < 1e-9 forfeits at most 1e-9/(1-gamma)
            // of value, far inside every tolerance used downstream.
            if (improvement < 1e-9) break;
        }
    }
    return gamma;
}

AlphaSet pbvi_solve(const CmaModel& model, const ObservationModel& z, const PbviConfig& config) {
    // Cohort start beliefs plus every state corner: concentrated beliefs live
    // near the simplex corners, so anchoring the alpha hull there keeps the
    // greedy policy aligned with the fully observable optimum at near-deltas.
    BeliefSet seeds;
    for (BatteryHealth bh : {BatteryHealth::Good, BatteryHealth::Medium, BatteryHealth::Poor})
        seeds.points.push_back(initial_belief(bh));
    for (StateId s = 0; s < kNumStates; ++s) seeds.points.push_back(Belief::delta(s, kNumStates));
    return pbvi_solve(model.transition, model.reward, model.legality, z, config, seeds);
}

}  // namespace cma
