#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cma/state.hpp"

namespace cma {

// One conditional probability table of the dynamic decision network.
// `cpt` maps a parent assignment (parent codes joined with '|', in parent
// order) to a distribution over child codes. Distributions may omit
// zero-probability values but must sum to 1 within 1e-12.
struct FactorTable {
    std::string child;
    std::vector<std::string> parents;
    std::map<std::string, std::map<std::string, double>> cpt;

    // Looks up P(child=value | assignment); throws naming the factor and the
    // missing assignment.
    double prob(const std::string& assignment, const std::string& value) const;
    const std::map<std::string, double>& row(const std::string& assignment) const;
};

struct RewardWeights {
    // Indexed by AbsorbingKind: C, T, FL, E.
    std::array<double, 4> w_absorbing{0.163, 0.0, 0.408, 0.0};
    // Feature weights in field order (FS, MH, MM, BH, RM).
    std::array<double, 5> w_state{0.0, 0.0, 0.082, 0.041, 0.163};
    // Indexed by Action.
    std::array<double, 4> w_action{0.082, 0.0, 0.02, 0.041};
};

// The full serializable model definition: the five feature factors, the
// completion/failure trigger factors, and the reward weights.
struct ModelSpec {
    int schema_version = 1;
    FactorTable flight_status;  // child fs,  parents (fs, action)
    FactorTable motor_health;   // child mh,  parents (mh)
    FactorTable motor_margin;   // child mm,  parents (mm, mh, action)
    FactorTable battery_health; // child bh,  parents (bh)
    FactorTable reach_margin;   // child rm,  parents (bh, rm, action)
    FactorTable complete;       // child complete, parents (fs, rm)
    FactorTable failure;        // child failure,  parents (mh, mm, rm)
    RewardWeights weights;
};

// The shipped default tables. Table-backed motor rows are pinned by golden
// tests; the remaining rows are the documented model-gap defaults.
ModelSpec default_model_spec();

std::string assignment_key(const std::vector<std::string>& parent_values);

// JSON (de)serialization of the full spec; load validates distributions and
// reports the offending factor/assignment on error.
std::string to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const std::string& text);
ModelSpec load_model_spec(const std::string& path);
void save_model_spec(const ModelSpec& spec, const std::string& path);

}  // namespace cma
