#include "cma/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cma {

namespace {
constexpr double kRowTol = 1e-12;
}

void TransitionModel::rebuild_sparse() {
    sparse.assign(static_cast<std::size_t>(n_actions) * n_states, {});
    for (int a = 0; a < n_actions; ++a) {
        for (int s = 0; s < n_states; ++s) {
            auto& row = sparse[static_cast<std::size_t>(a) * n_states + s];
            for (int to = 0; to < n_states; ++to) {
                const double p = prob(a, s, to);
                if (p > 0.0) row.push_back({to, p});
            }
        }
    }
}

TransitionModel build_transition(const ModelSpec& spec) {
    TransitionModel t;
    t.n_states = kNumStates;
    t.n_actions = kNumActions;
    t.dense.assign(static_cast<std::size_t>(kNumActions) * kNumStates * kNumStates, 0.0);
    auto at = [&](int a, int s, int to) -> double& {
        return t.dense[(static_cast<std::size_t>(a) * kNumStates + s) * kNumStates + to];
    };

    for (StateId s = 0; s < kNumFactoredStates; ++s) {
        const FactoredState f = decode(s);
        const std::string fs_c = to_code(f.fs);
        const std::string mh_c = to_code(f.mh);
        const std::string mm_c = to_code(f.mm);
        const std::string bh_c = to_code(f.bh);
        const std::string rm_c = to_code(f.rm);

        for (int ai = 0; ai < kNumActions; ++ai) {
            const Action a = static_cast<Action>(ai);
            if (a == Action::Terminate) {
                at(ai, s, kStateTerminated) = 1.0;
                continue;
            }
            const std::string a_c = to_code(a);
            const double p_fail = spec.failure.prob(assignment_key({mh_c, mm_c, rm_c}), "true");
            const double p_complete = spec.complete.prob(assignment_key({fs_c, rm_c}), "true");
            at(ai, s, kStateFailed) += p_fail;
            at(ai, s, kStateComplete) += (1.0 - p_fail) * p_complete;
            const double remaining = (1.0 - p_fail) * (1.0 - p_complete);
            if (remaining <= 0.0) continue;

            const auto& fs_row = spec.flight_status.row(assignment_key({fs_c, a_c}));
            const auto& mh_row = spec.motor_health.row(mh_c);
            const auto& mm_row = spec.motor_margin.row(assignment_key({mm_c, mh_c, a_c}));
            const auto& bh_row = spec.battery_health.row(bh_c);
            const auto& rm_row = spec.reach_margin.row(assignment_key({bh_c, rm_c, a_c}));
            for (const auto& [fs2, p_fs] : fs_row) {
                if (p_fs == 0.0) continue;
                const FlightStatus nfs = flight_status_from_code(fs2);
                for (const auto& [mh2, p_mh] : mh_row) {
                    if (p_mh == 0.0) continue;
                    const MotorHealth nmh = motor_health_from_code(mh2);
                    for (const auto& [mm2, p_mm] : mm_row) {
                        if (p_mm == 0.0) continue;
                        const MotorMargin nmm = motor_margin_from_code(mm2);
                        for (const auto& [bh2, p_bh] : bh_row) {
                            if (p_bh == 0.0) continue;
                            const BatteryHealth nbh = battery_health_from_code(bh2);
                            for (const auto& [rm2, p_rm] : rm_row) {
                                if (p_rm == 0.0) continue;
                                const StateId to = encode({nfs, nmh, nmm, nbh,
                                                           reach_margin_from_code(rm2)});
                                at(ai, s, to) += remaining * p_fs * p_mh * p_mm * p_bh * p_rm;
                            }
                        }
                    }
                }
            }
        }
    }

    for (int ai = 0; ai < kNumActions; ++ai) {
        at(ai, kStateComplete, kStateEnd) = 1.0;
        at(ai, kStateTerminated, kStateEnd) = 1.0;
        at(ai, kStateFailed, kStateEnd) = 1.0;
        at(ai, kStateEnd, kStateEnd) = 1.0;
    }

    // Illegal pairs fall back to the NoOp row; masking lives in the solvers.
    for (StateId s = 0; s < kNumStates; ++s) {
        for (int ai = 1; ai < kNumActions; ++ai) {
            if (is_legal(s, static_cast<Action>(ai))) continue;
            for (int to = 0; to < kNumStates; ++to) at(ai, s, to) = at(0, s, to);
        }
    }

    for (int ai = 0; ai < kNumActions; ++ai) {
        for (StateId s = 0; s < kNumStates; ++s) {
            double sum = 0.0;
            for (int to = 0; to < kNumStates; ++to) sum += at(ai, s, to);
            if (std::abs(sum - 1.0) > kRowTol) {
                std::ostringstream ss;
                ss << "build_transition: row (" << to_code(static_cast<Action>(ai)) << ", "
                   << state_name(s) << ") sums to " << sum;
                throw std::invalid_argument(ss.str());
            }
        }
    }

    t.rebuild_sparse();
    return t;
}

namespace {

double feature_sign(const FactoredState& f, int i) {
    switch (i) {
        case 0: return f.fs == FlightStatus::Nominal ? 1.0 : -1.0;
        case 1:
            return f.mh == MotorHealth::NoFault ? 1.0
                                                : (f.mh == MotorHealth::SpallFault ? 0.0 : -1.0);
        case 2: return f.mm == MotorMargin::MM1 ? 1.0 : -1.0;
        case 3:
            return f.bh == BatteryHealth::Good ? 1.0
                                               : (f.bh == BatteryHealth::Medium ? 0.0 : -1.0);
        default: return f.rm == ReachMargin::RM1 ? 1.0 : -1.0;
    }
}

double action_sign(Action a) {
    switch (a) {
        case Action::NoOp: return 1.0;
        case Action::Terminate: return -1.0;
        case Action::LandAsap: return -0.5;
        case Action::LandPractical: return 0.5;
    }
    return 0.0;
}

double absorbing_sign(AbsorbingKind k) {
    switch (k) {
        case AbsorbingKind::Complete: return 1.0;
        case AbsorbingKind::Terminated: return -0.1;
        case AbsorbingKind::Failed: return -1.0;
        case AbsorbingKind::End: return 0.0;
    }
    return 0.0;
}

}  // namespace

RewardModel build_reward(const RewardWeights& weights) {
    RewardModel m;
    m.n_states = kNumStates;
    m.n_actions = kNumActions;
    m.weights = weights;
    m.r.assign(static_cast<std::size_t>(kNumStates) * kNumActions, 0.0);
    for (StateId s = 0; s < kNumStates; ++s) {
        if (is_absorbing(s)) {
            const AbsorbingKind k = absorbing_kind(s);
            const double value = weights.w_absorbing[static_cast<int>(k)] * absorbing_sign(k);
            for (int a = 0; a < kNumActions; ++a) m.r[static_cast<std::size_t>(s) * kNumActions + a] = value;
            continue;
        }
        const FactoredState f = decode(s);
        double state_term = 0.0;
        for (int i = 0; i < 5; ++i) state_term += weights.w_state[i] * feature_sign(f, i);
        for (int ai = 0; ai < kNumActions; ++ai) {
            const Action a = static_cast<Action>(ai);
            const Action effective = is_legal(s, a) ? a : Action::NoOp;
            m.r[static_cast<std::size_t>(s) * kNumActions + ai] =
                state_term + weights.w_action[static_cast<int>(effective)] * action_sign(effective);
        }
    }
    return m;
}

double reward(const RewardModel& model, StateId s, Action a) {
    if (s < 0 || s >= model.n_states) throw std::out_of_range("reward: bad state id");
    if (!is_legal(s, a))
        throw std::invalid_argument("reward: action " + to_code(a) + " illegal at state " +
                                    state_name(s));
    return model.at(s, static_cast<int>(a));
}

LegalityMask cma_legality() {
    LegalityMask mask(kNumStates, 0);
    for (StateId s = 0; s < kNumStates; ++s)
        for (int a = 0; a < kNumActions; ++a)
            if (is_legal(s, static_cast<Action>(a))) mask[s] |= static_cast<std::uint8_t>(1u << a);
    return mask;
}

CmaModel build_cma_model(const ModelSpec& spec) {
    return CmaModel{build_transition(spec), build_reward(spec.weights), cma_legality()};
}

ValidationReport validate_model(const TransitionModel& t, const RewardModel& r,
                                const LegalityMask& legality) {
    ValidationReport rep;
    for (int a = 0; a < t.n_actions; ++a) {
        for (int s = 0; s < t.n_states; ++s) {
            double sum = 0.0;
            bool in_range = true;
            for (int to = 0; to < t.n_states; ++to) {
                const double p = t.prob(a, s, to);
                sum += p;
                if (p < 0.0 || p > 1.0) in_range = false;
            }
            if (std::abs(sum - 1.0) > kRowTol || !in_range)
                rep.nonstochastic_rows.push_back({a, s, sum});
        }
    }
    for (int s = 0; s < t.n_states; ++s) {
        for (int a = 0; a < t.n_actions; ++a) {
            if ((legality[s] >> a) & 1) continue;
            bool mismatch = r.at(s, a) != r.at(s, 0);
            for (int to = 0; to < t.n_states && !mismatch; ++to)
                mismatch = t.prob(a, s, to) != t.prob(0, s, to);
            if (mismatch) rep.illegal_pair_mismatches.push_back({s, a});
        }
    }
    rep.unreachable_states.assign(t.n_actions, {});
    for (int a = 0; a < t.n_actions; ++a) {
        for (int to = 0; to < t.n_states; ++to) {
            double incoming = 0.0;
            for (int s = 0; s < t.n_states; ++s) incoming += t.prob(a, s, to);
            if (incoming == 0.0) rep.unreachable_states[a].push_back(to);
        }
    }
    return rep;
}

ValidationReport validate_model(const CmaModel& model) {
    return validate_model(model.transition, model.reward, model.legality);
}

std::string ValidationReport::summary() const {
    std::ostringstream ss;
    if (ok()) {
        ss << "model ok";
    } else {
        for (const auto& e : errors) ss << "error: " << e << "\n";
        for (const auto& row : nonstochastic_rows)
            ss << "non-stochastic row: action=" << row.action << " state=" << row.state
               << " sum=" << row.row_sum << "\n";
        for (const auto& p : illegal_pair_mismatches)
            ss << "illegal pair deviates from NoOp: state=" << p.state << " action=" << p.action
               << "\n";
    }
    std::size_t unreachable_total = 0;
    for (const auto& v : unreachable_states) unreachable_total += v.size();
    ss << " (unreachable state/action combos: " << unreachable_total << ")";
    return ss.str();
}

}  // namespace cma
