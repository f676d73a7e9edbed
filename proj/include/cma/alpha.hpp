#pragma once

#include <vector>

#include "cma/belief.hpp"
#include "cma/value_iteration.hpp"

namespace cma {

// One hyperplane of a piecewise-linear convex value function, tagged with the
// action to execute where it maximizes.
struct AlphaVector {
    std::vector<double> values;
    int action = 0;
};

struct AlphaSet {
    std::vector<AlphaVector> alphas;

    double value_at(const Belief& b) const;
    // Index of the maximizing alpha; ties toward the lowest index.
    int best_alpha(const Belief& b) const;
};

// QMDP approximation: one alpha per action with values q[s][a], where the
// entry of an illegal action is replaced by q[s][NoOp].
AlphaSet qmdp_alphas(const ValueFunction& vf, const LegalityMask& legality);

// Action of the maximizing alpha at b.
int alpha_policy_action(const AlphaSet& alphas, const Belief& b);

}  // namespace cma
