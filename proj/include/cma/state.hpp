#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cma {

// Feature enums for the factored contingency-management state
// (FS, MH, MM, BH, RM). Ordering is load-bearing: it fixes the state index.
enum class FlightStatus : std::uint8_t { Nominal = 0, EmergencyAsap = 1, EmergencyPractical = 2 };
enum class MotorHealth : std::uint8_t { NoFault = 0, SpallFault = 1, JamFault = 2 };
enum class MotorMargin : std::uint8_t { MM0 = 0, MM1 = 1 };  // MM0: margin < 0
enum class BatteryHealth : std::uint8_t { Good = 0, Medium = 1, Poor = 2 };
enum class ReachMargin : std::uint8_t { RM0 = 0, RM1 = 1 };  // RM0: margin < 0

enum class Action : std::uint8_t { NoOp = 0, Terminate = 1, LandAsap = 2, LandPractical = 3 };

enum class AbsorbingKind : std::uint8_t { Complete = 0, Terminated = 1, Failed = 2, End = 3 };

using StateId = int;

inline constexpr int kNumFactoredStates = 108;  // 3*3*2*3*2
inline constexpr int kNumStates = 112;
inline constexpr int kNumActions = 4;
inline constexpr StateId kStateComplete = 108;
inline constexpr StateId kStateTerminated = 109;
inline constexpr StateId kStateFailed = 110;
inline constexpr StateId kStateEnd = 111;

struct FactoredState {
    FlightStatus fs = FlightStatus::Nominal;
    MotorHealth mh = MotorHealth::NoFault;
    MotorMargin mm = MotorMargin::MM1;
    BatteryHealth bh = BatteryHealth::Good;
    ReachMargin rm = ReachMargin::RM1;

    friend bool operator==(const FactoredState&, const FactoredState&) = default;
};

// Row-major index in field order (fs, mh, mm, bh, rm); sizes 3,3,2,3,2.
StateId encode(const FactoredState& s);
FactoredState decode(StateId id);

inline bool is_absorbing(StateId s) { return s >= kNumFactoredStates; }
inline bool is_factored(StateId s) { return s >= 0 && s < kNumFactoredStates; }

AbsorbingKind absorbing_kind(StateId s);
StateId absorbing_state(AbsorbingKind k);

// Action legality by flight status: Nominal allows all four,
// EmergencyPractical drops LandPractical, EmergencyAsap drops both landing
// actions. Absorbing states allow only NoOp.
std::vector<Action> legal_actions(StateId s);
bool is_legal(StateId s, Action a);

// Short domain codes used in serialized tables ("N", "SF", "MM0", ...).
std::string to_code(FlightStatus v);
std::string to_code(MotorHealth v);
std::string to_code(MotorMargin v);
std::string to_code(BatteryHealth v);
std::string to_code(ReachMargin v);
std::string to_code(Action v);
std::string state_name(StateId s);

FlightStatus flight_status_from_code(const std::string& c);
MotorHealth motor_health_from_code(const std::string& c);
MotorMargin motor_margin_from_code(const std::string& c);
BatteryHealth battery_health_from_code(const std::string& c);
ReachMargin reach_margin_from_code(const std::string& c);
Action action_from_code(const std::string& c);

}  // namespace cma
