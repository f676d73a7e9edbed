#pragma once

#include <utility>
#include <vector>

#include "cma/state.hpp"

namespace cma {

// Remaining-useful-life prognosis for the motor: per-fault-type RUL estimates
// with weights summing to 1.
struct MotorPrognosis {
    double flight_time_s = 0.0;
    std::vector<double> rul_s;
    std::vector<double> fault_weights;
};

struct BatteryPrognosis {
    double flight_time_s = 0.0;
    double eod_time_s = 0.0;  // end-of-discharge time
};

// Motor margin: 1 - sum_i w_i * t_flight / t_rul_i. May be negative.
double motor_margin(const MotorPrognosis& prog);

// Reachability margin: 1 - t_flight / t_eod. May be negative.
double reachability_margin(const BatteryPrognosis& prog);

// Sign binarization: negative -> MM0/RM0, nonnegative -> MM1/RM1.
std::pair<MotorMargin, ReachMargin> discretize_margins(double mm, double rm);

}  // namespace cma
