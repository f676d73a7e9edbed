#include "cma/alpha.hpp"

#include <stdexcept>

namespace cma {

namespace {
double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}
}  // namespace

double AlphaSet::value_at(const Belief& b) const {
    if (alphas.empty()) throw std::logic_error("AlphaSet: empty set");
    double best = dot(alphas[0].values, b.p);
    for (std::size_t i = 1; i < alphas.size(); ++i)
        best = std::max(best, dot(alphas[i].values, b.p));
    return best;
}

int AlphaSet::best_alpha(const Belief& b) const {
    if (alphas.empty()) throw std::logic_error("AlphaSet: empty set");
    int best = 0;
    double best_value = dot(alphas[0].values, b.p);
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        const double v = dot(alphas[i].values, b.p);
        if (v > best_value) {
            best_value = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

AlphaSet qmdp_alphas(const ValueFunction& vf, const LegalityMask& legality) {
    const int n = static_cast<int>(vf.v.size());
    AlphaSet set;
    set.alphas.reserve(vf.n_actions);
    for (int a = 0; a < vf.n_actions; ++a) {
        AlphaVector alpha;
        alpha.action = a;
        alpha.values.resize(n);
        for (int s = 0; s < n; ++s) {
            const bool legal = (legality[s] >> a) & 1;
            alpha.values[s] = legal ? vf.q_at(s, a) : vf.q_at(s, 0);
        }
        set.alphas.push_back(std::move(alpha));
    }
    return set;
}

int alpha_policy_action(const AlphaSet& alphas, const Belief& b) {
    return alphas.alphas[alphas.best_alpha(b)].action;
}

}  // namespace cma
