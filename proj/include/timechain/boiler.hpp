#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "timechain/ta.hpp"

namespace timechain::boiler {

/// Steam boiler parameters. Levels in liters, rates in l/min, delays in
/// minutes. `power` is recorded for documentation; it does not enter the
/// level dynamics.
struct BoilerConfig {
    double w0 = 0;
    std::array<double, 2> pump_rates{0, 0};        // P1, P2
    std::array<double, 2> pump_start_delays{0, 0}; // T1, T2
    double vaporization_rate = 0;                  // r
    double power = 0;
    double w_min = 0;
    double w_max = 0;

    void validate() const; // throws InvalidConfig
};

enum class PumpCommand { On, Off };

struct PumpEvent {
    double time = 0; // minutes
    int pump = 1;    // 1 or 2
    PumpCommand command = PumpCommand::On;
};

/// Commands in non-decreasing time order. Switch-on takes effect T_i later;
/// switch-off is immediate and cancels a pending start.
using PumpCommandSchedule = std::vector<PumpEvent>;

struct Sample {
    double t = 0;
    double w = 0;
    double u1 = 0; // effective inflow of pump 1
    double u2 = 0;
    std::string mode; // "off", "p1", "p2", "p1p2"
};

/// Water-level time series: uniform samples plus the exact instants at which
/// the effective pump mode changed (these need not fall on the grid).
struct Trajectory {
    double dt = 0;
    std::vector<Sample> samples;
    std::vector<Sample> mode_switches;
};

/// Exact segment-wise integration of the piecewise-constant-rate dynamics
/// dw/dt = u1 + u2 - r; dt is only the output sampling step.
Trajectory simulate(const BoilerConfig& cfg, const PumpCommandSchedule& schedule,
                    double horizon_min, double dt_min);

enum class CriticalKind { NearLowLimit, NearHighLimit, ModeSwitch };

struct CriticalPoint {
    double time = 0;
    CriticalKind kind = CriticalKind::ModeSwitch;
    double margin = 0; // liters, >= 0
};

/// Samples within `margin_threshold` of a level limit (first sample of each
/// contiguous run) and every effective mode switch.
std::vector<CriticalPoint> find_critical_points(const Trajectory& traj, const BoilerConfig& cfg,
                                                double margin_threshold);

/// Largest actuation delay, in ticks, that keeps the level inside
/// [w_min, w_max] under the worst-case drain (rate r toward w_min) or fill
/// (rate P1 + P2 - r toward w_max). A side with zero rate is unbounded;
/// nullopt when both sides are.
std::optional<ta::Ticks> required_response_bound(const BoilerConfig& cfg, double w_at_stimulus,
                                                 ta::Ticks ticks_per_minute);

/// Delimited text (t, w, u1, u2, mode), one sample per line, for plotting.
std::string to_delimited(const Trajectory& traj);

} // namespace timechain::boiler
