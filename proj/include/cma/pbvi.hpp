#pragma once

#include <cstdint>
#include <vector>

#include "cma/alpha.hpp"
#include "cma/belief.hpp"
#include "cma/rng.hpp"

namespace cma {

struct BeliefSet {
    std::vector<Belief> points;
};

struct PbviConfig {
    double discount = 0.99;
    int num_expansions = 30;
    int backups_per_expansion = 20;
    std::uint64_t seed = 0;
    // Growth cap; expansion stops adding points once reached. The belief set
    // otherwise doubles per expansion round.
    int max_beliefs = 384;
    // Reachable-space seeding: beliefs harvested from this many simulated
    // episodes per start point (greedy MDP actions at the most-probable
    // state) join the initial set before expansion. Zero disables it.
    int harvest_episodes = 40;
    int harvest_horizon = 100;
    // Candidates closer than this L1 distance to the set are duplicates.
    double dedupe_tol = 0.005;
};

// One expansion round: for each point, simulate one step per action with a
// sampled observation and add the candidate successor farthest (L1) from the
// current set; a candidate at distance 0 is already covered and is skipped.
// Deterministic given the seed carried by `rng`.
BeliefSet expand_beliefs(const BeliefSet& bs, const TransitionModel& t, const ObservationModel& z,
                         Rng& rng, int max_beliefs);

// Point-based value iteration standing in for a full offline solver:
// initialized from the blind (fixed-action) lower-bound alphas, alternating
// seeded belief expansion with synchronous point backups, pruning dominated
// alphas. Every produced alpha is a policy value, so the returned set lower
// bounds the optimal value function everywhere.
AlphaSet pbvi_solve(const TransitionModel& t, const RewardModel& r, const LegalityMask& legality,
                    const ObservationModel& z, const PbviConfig& config,
                    const BeliefSet& initial_points);

// Convenience: seeds the belief set with the three battery-health cohort
// start beliefs.
AlphaSet pbvi_solve(const CmaModel& model, const ObservationModel& z, const PbviConfig& config);

// Fixed-action ("blind") policy values; each is a valid lower bound.
AlphaSet blind_lower_bound(const TransitionModel& t, const RewardModel& r, double discount);

// Drops exact duplicates, pointwise-dominated alphas, and alphas that win at
// no belief point. The pruned set's value at every point matches the input
// set exactly.
AlphaSet prune_alphas(const AlphaSet& set, const BeliefSet& points);

}  // namespace cma
