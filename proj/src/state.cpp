#include "cma/state.hpp"

#include <stdexcept>

namespace cma {

StateId encode(const FactoredState& s) {
    int idx = static_cast<int>(s.fs);
    idx = idx * 3 + static_cast<int>(s.mh);
    idx = idx * 2 + static_cast<int>(s.mm);
    idx = idx * 3 + static_cast<int>(s.bh);
    idx = idx * 2 + static_cast<int>(s.rm);
    return idx;
}

FactoredState decode(StateId id) {
    if (!is_factored(id)) throw std::out_of_range("decode: not a factored state id");
    FactoredState s;
    s.rm = static_cast<ReachMargin>(id % 2);
    id /= 2;
    s.bh = static_cast<BatteryHealth>(id % 3);
    id /= 3;
    s.mm = static_cast<MotorMargin>(id % 2);
    id /= 2;
    s.mh = static_cast<MotorHealth>(id % 3);
    id /= 3;
    s.fs = static_cast<FlightStatus>(id);
    return s;
}

AbsorbingKind absorbing_kind(StateId s) {
    switch (s) {
        case kStateComplete: return AbsorbingKind::Complete;
        case kStateTerminated: return AbsorbingKind::Terminated;
        case kStateFailed: return AbsorbingKind::Failed;
        case kStateEnd: return AbsorbingKind::End;
        default: throw std::out_of_range("absorbing_kind: not an absorbing state");
    }
}

StateId absorbing_state(AbsorbingKind k) {
    return kNumFactoredStates + static_cast<int>(k);
}

std::vector<Action> legal_actions(StateId s) {
    if (is_absorbing(s)) return {Action::NoOp};
    switch (decode(s).fs) {
        case FlightStatus::Nominal:
            return {Action::NoOp, Action::Terminate, Action::LandAsap, Action::LandPractical};
        case FlightStatus::EmergencyPractical:
            return {Action::NoOp, Action::Terminate, Action::LandAsap};
        case FlightStatus::EmergencyAsap:
            return {Action::NoOp, Action::Terminate};
    }
    throw std::logic_error("legal_actions: bad flight status");
}

bool is_legal(StateId s, Action a) {
    if (a == Action::NoOp || a == Action::Terminate) return !is_absorbing(s) || a == Action::NoOp;
    if (is_absorbing(s)) return false;
    const FlightStatus fs = decode(s).fs;
    if (a == Action::LandAsap) return fs != FlightStatus::EmergencyAsap;
    return fs == FlightStatus::Nominal;  // LandPractical
}

std::string to_code(FlightStatus v) {
    switch (v) {
        case FlightStatus::Nominal: return "N";
        case FlightStatus::EmergencyAsap: return "ELASAP";
        case FlightStatus::EmergencyPractical: return "ELPract";
    }
    return "?";
}
std::string to_code(MotorHealth v) {
    switch (v) {
        case MotorHealth::NoFault: return "NF";
        case MotorHealth::SpallFault: return "SF";
        case MotorHealth::JamFault: return "JF";
    }
    return "?";
}
std::string to_code(MotorMargin v) { return v == MotorMargin::MM0 ? "MM0" : "MM1"; }
std::string to_code(BatteryHealth v) {
    switch (v) {
        case BatteryHealth::Good: return "G";
        case BatteryHealth::Medium: return "M";
        case BatteryHealth::Poor: return "P";
    }
    return "?";
}
std::string to_code(ReachMargin v) { return v == ReachMargin::RM0 ? "RM0" : "RM1"; }
std::string to_code(Action v) {
    switch (v) {
        case Action::NoOp: return "NoOp";
        case Action::Terminate: return "Terminate";
        case Action::LandAsap: return "LandASAP";
        case Action::LandPractical: return "LandPract";
    }
    return "?";
}

std::string state_name(StateId s) {
    if (is_absorbing(s)) {
        switch (absorbing_kind(s)) {
            case AbsorbingKind::Complete: return "C";
            case AbsorbingKind::Terminated: return "T";
            case AbsorbingKind::Failed: return "FL";
            case AbsorbingKind::End: return "E";
        }
    }
    const FactoredState f = decode(s);
    return "{" + to_code(f.fs) + "," + to_code(f.mh) + "," + to_code(f.mm) + "," + to_code(f.bh) +
           "," + to_code(f.rm) + "}";
}

namespace {
[[noreturn]] void bad_code(const char* what, const std::string& c) {
    throw std::invalid_argument(std::string("unknown ") + what + " code: '" + c + "'");
}
}  // namespace

FlightStatus flight_status_from_code(const std::string& c) {
    if (c == "N") return FlightStatus::Nominal;
    if (c == "ELASAP") return FlightStatus::EmergencyAsap;
    if (c == "ELPract") return FlightStatus::EmergencyPractical;
    bad_code("flight status", c);
}
MotorHealth motor_health_from_code(const std::string& c) {
    if (c == "NF") return MotorHealth::NoFault;
    if (c == "SF") return MotorHealth::SpallFault;
    if (c == "JF") return MotorHealth::JamFault;
    bad_code("motor health", c);
}
MotorMargin motor_margin_from_code(const std::string& c) {
    if (c == "MM0") return MotorMargin::MM0;
    if (c == "MM1") return MotorMargin::MM1;
    bad_code("motor margin", c);
}
BatteryHealth battery_health_from_code(const std::string& c) {
    if (c == "G") return BatteryHealth::Good;
    if (c == "M") return BatteryHealth::Medium;
    if (c == "P") return BatteryHealth::Poor;
    bad_code("battery health", c);
}
ReachMargin reach_margin_from_code(const std::string& c) {
    if (c == "RM0") return ReachMargin::RM0;
    if (c == "RM1") return ReachMargin::RM1;
    bad_code("reach margin", c);
}
Action action_from_code(const std::string& c) {
    if (c == "NoOp") return Action::NoOp;
    if (c == "Terminate") return Action::Terminate;
    if (c == "LandASAP") return Action::LandAsap;
    if (c == "LandPract") return Action::LandPractical;
    bad_code("action", c);
}

}  // namespace cma
