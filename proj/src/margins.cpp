#include "cma/margins.hpp"

#include <cmath>
#include <stdexcept>

namespace cma {

double motor_margin(const MotorPrognosis& prog) {
    if (!(prog.flight_time_s > 0.0)) throw std::domain_error("motor_margin: flight time must be > 0");
    if (prog.rul_s.empty() || prog.rul_s.size() != prog.fault_weights.size())
        throw std::domain_error("motor_margin: rul and fault_weights must be non-empty and equal length");
    double weight_sum = 0.0;
    double used = 0.0;
    for (std::size_t i = 0; i < prog.rul_s.size(); ++i) {
        if (!(prog.rul_s[i] > 0.0)) throw std::domain_error("motor_margin: rul entries must be > 0");
        weight_sum += prog.fault_weights[i];
        used += prog.fault_weights[i] * prog.flight_time_s / prog.rul_s[i];
    }
    if (std::abs(weight_sum - 1.0) > 1e-12)
        throw std::domain_error("motor_margin: fault weights must sum to 1");
    return 1.0 - used;
}

double reachability_margin(const BatteryPrognosis& prog) {
    if (!(prog.flight_time_s > 0.0) || !(prog.eod_time_s > 0.0))
        throw std::domain_error("reachability_margin: times must be > 0");
    return 1.0 - prog.flight_time_s / prog.eod_time_s;
}

std::pair<MotorMargin, ReachMargin> discretize_margins(double mm, double rm) {
    return {mm < 0.0 ? MotorMargin::MM0 : MotorMargin::MM1,
            rm < 0.0 ? ReachMargin::RM0 : ReachMargin::RM1};
}

}  // namespace cma
