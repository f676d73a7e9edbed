#pragma once

#include <span>
#include <string>
#include <vector>

#include "cma/factors.hpp"
#include "cma/state.hpp"

namespace cma {

// Row-stochastic transition tensor P[action][from][to], stored dense plus a
// sparse per-row view (the CMA rows have at most ~10 nonzeros). Generic over
// the state/action counts so toy models share the solver code.
struct TransitionModel {
    struct Entry {
        int to;
        double p;
    };

    int n_states = 0;
    int n_actions = 0;
    std::vector<double> dense;               // [a][s][s'] flattened
    std::vector<std::vector<Entry>> sparse;  // indexed a * n_states + s

    double prob(int a, int s, int to) const {
        return dense[(static_cast<std::size_t>(a) * n_states + s) * n_states + to];
    }
    std::span<const Entry> row(int a, int s) const {
        return sparse[static_cast<std::size_t>(a) * n_states + s];
    }
    // Call after filling `dense` to (re)build the sparse view.
    void rebuild_sparse();
};

// R[state][action]; illegal pairs mirror the NoOp column, absorbing states
// carry their one-time entry reward in every column.
struct RewardModel {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> r;  // [s][a] flattened
    RewardWeights weights;

    double at(int s, int a) const { return r[static_cast<std::size_t>(s) * n_actions + a]; }
};

// Per-state legal-action bitmask (bit a set = action a legal).
using LegalityMask = std::vector<std::uint8_t>;

struct CmaModel {
    TransitionModel transition;
    RewardModel reward;
    LegalityMask legality;

    bool legal(int s, int a) const { return (legality[s] >> a) & 1; }
};

// Assembles the 4x112x112 transition tensor from the factor tables.
// Composition per (s, a): Terminate maps straight to T; otherwise the failure
// trigger fires first, then completion, then the factored next state; C/T/FL
// map to E and E self-loops. Rows of illegal (s, a) pairs copy the NoOp row.
TransitionModel build_transition(const ModelSpec& spec);

// R(s,a) = w_s . f_S(s) + w_a(a) f_A(a) on factored states, w_e(s) f_E(s) on
// absorbing states (no action term, collected once on entry).
RewardModel build_reward(const RewardWeights& weights);

// Checked reward lookup; throws if `a` is illegal at `s`.
double reward(const RewardModel& model, StateId s, Action a);

LegalityMask cma_legality();
CmaModel build_cma_model(const ModelSpec& spec);

struct ValidationReport {
    struct RowIssue {
        int action;
        int state;
        double row_sum;
    };
    struct PairIssue {
        int state;
        int action;
    };
    std::vector<RowIssue> nonstochastic_rows;
    // Illegal (s,a) pairs whose transition row or reward deviates from NoOp's.
    std::vector<PairIssue> illegal_pair_mismatches;
    // Informational: states with no incoming probability mass, per action.
    std::vector<std::vector<int>> unreachable_states;
    std::vector<std::string> errors;  // construction failures surfaced as text

    bool ok() const { return nonstochastic_rows.empty() && illegal_pair_mismatches.empty() && errors.empty(); }
    std::string summary() const;
};

ValidationReport validate_model(const TransitionModel& t, const RewardModel& r,
                                const LegalityMask& legality);
ValidationReport validate_model(const CmaModel& model);

}  // namespace cma
