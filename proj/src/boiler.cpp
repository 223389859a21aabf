#include "timechain/boiler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "timechain/errors.hpp"

namespace timechain::boiler {

void BoilerConfig::validate() const {
    if (!(w_min < w0 && w0 < w_max)) {
        throw InvalidConfig("initial level must lie strictly between the limits");
    }
    if (pump_rates[0] < 0 || pump_rates[1] < 0 || vaporization_rate < 0) {
        throw InvalidConfig("rates must be non-negative");
    }
    if (pump_start_delays[0] < 0 || pump_start_delays[1] < 0) {
        throw InvalidConfig("pump start delays must be non-negative");
    }
}

namespace {

struct Switch {
    double time;
    int pump; // 0-based
    bool on;
};

/// Effective pump on/off instants from the command schedule: on-commands act
/// T_i later unless cancelled by an earlier off, off-commands act at once.
std::vector<Switch> effective_switches(const BoilerConfig& cfg,
                                       const PumpCommandSchedule& schedule, double horizon) {
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (schedule[i].time < schedule[i - 1].time) {
            throw InvalidConfig("pump command times must be non-decreasing");
        }
    }
    std::vector<Switch> out;
    for (int p = 0; p < 2; ++p) {
        bool commanded = false;
        bool pumping = false;
        double pending = -1;
        auto settle_until = [&](double t) {
            if (commanded && !pumping && pending >= 0 && pending <= t) {
                pumping = true;
                out.push_back({pending, p, true});
                pending = -1;
            }
        };
        for (const auto& ev : schedule) {
            if (ev.pump != p + 1) continue;
            if (ev.time < 0) throw InvalidConfig("pump command times must be non-negative");
            settle_until(ev.time);
            if (ev.command == PumpCommand::On) {
                if (!commanded) {
                    commanded = true;
                    pending = ev.time + cfg.pump_start_delays[p];
                }
            } else {
                if (commanded) {
                    commanded = false;
                    if (pumping) {
                        pumping = false;
                        out.push_back({ev.time, p, false});
                    }
                    pending = -1;
                }
            }
        }
        settle_until(horizon);
    }
    std::sort(out.begin(), out.end(), [](const Switch& a, const Switch& b) {
        return a.time < b.time || (a.time == b.time && a.pump < b.pump);
    });
    return out;
}

std::string mode_token(bool p1, bool p2) {
    if (p1 && p2) return "p1p2";
    if (p1) return "p1";
    if (p2) return "p2";
    return "off";
}

/// Piecewise-linear closed form: breakpoint times with exact levels.
struct Segments {
    std::vector<double> time;   // breakpoints, starting at 0
    std::vector<double> level;  // w at each breakpoint
    std::vector<double> slope;  // dw/dt after each breakpoint
    std::vector<bool> p1, p2;   // pump effectiveness after each breakpoint

    double at(double t) const {
        auto it = std::upper_bound(time.begin(), time.end(), t);
        const std::size_t seg = static_cast<std::size_t>(it - time.begin()) - 1;
        return level[seg] + slope[seg] * (t - time[seg]);
    }
    std::size_t segment(double t) const {
        auto it = std::upper_bound(time.begin(), time.end(), t);
        return static_cast<std::size_t>(it - time.begin()) - 1;
    }
};

Segments build_segments(const BoilerConfig& cfg, const std::vector<Switch>& switches,
                        double horizon) {
    Segments s;
    bool p1 = false, p2 = false;
    auto slope = [&] {
        return (p1 ? cfg.pump_rates[0] : 0.0) + (p2 ? cfg.pump_rates[1] : 0.0) -
               cfg.vaporization_rate;
    };
    s.time.push_back(0);
    s.level.push_back(cfg.w0);
    // Switches at t=0 take effect immediately in the first segment.
    std::size_t i = 0;
    while (i < switches.size() && switches[i].time <= 0) {
        (switches[i].pump == 0 ? p1 : p2) = switches[i].on;
        ++i;
    }
    s.slope.push_back(slope());
    s.p1.push_back(p1);
    s.p2.push_back(p2);
    for (; i < switches.size(); ++i) {
        const double t = switches[i].time;
        if (t > horizon) break;
        if (t > s.time.back()) {
            const double w = s.level.back() + s.slope.back() * (t - s.time.back());
            s.time.push_back(t);
            s.level.push_back(w);
            s.slope.push_back(0);
            s.p1.push_back(p1);
            s.p2.push_back(p2);
        }
        (switches[i].pump == 0 ? p1 : p2) = switches[i].on;
        s.slope.back() = slope();
        s.p1.back() = p1;
        s.p2.back() = p2;
    }
    return s;
}

} // namespace

Trajectory simulate(const BoilerConfig& cfg, const PumpCommandSchedule& schedule,
                    double horizon_min, double dt_min) {
    cfg.validate();
    if (dt_min <= 0) throw InvalidConfig("dt must be positive");
    if (horizon_min < dt_min) throw InvalidConfig("horizon must be at least one step");

    const auto switches = effective_switches(cfg, schedule, horizon_min);
    const Segments segs = build_segments(cfg, switches, horizon_min);

    Trajectory traj;
    traj.dt = dt_min;
    const std::size_t steps = static_cast<std::size_t>(horizon_min / dt_min + 1e-9);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt_min;
        const std::size_t seg = segs.segment(t);
        Sample sample;
        sample.t = t;
        sample.w = segs.at(t);
        sample.u1 = segs.p1[seg] ? cfg.pump_rates[0] : 0.0;
        sample.u2 = segs.p2[seg] ? cfg.pump_rates[1] : 0.0;
        sample.mode = mode_token(segs.p1[seg], segs.p2[seg]);
        traj.samples.push_back(std::move(sample));
    }
    for (const auto& sw : switches) {
        if (sw.time > horizon_min) continue;
        const std::size_t seg = segs.segment(sw.time);
        Sample sample;
        sample.t = sw.time;
        sample.w = segs.at(sw.time);
        sample.u1 = segs.p1[seg] ? cfg.pump_rates[0] : 0.0;
        sample.u2 = segs.p2[seg] ? cfg.pump_rates[1] : 0.0;
        sample.mode = mode_token(segs.p1[seg], segs.p2[seg]);
        traj.mode_switches.push_back(std::move(sample));
    }
    return traj;
}

std::vector<CriticalPoint> find_critical_points(const Trajectory& traj, const BoilerConfig& cfg,
                                                double margin_threshold) {
    std::vector<CriticalPoint> points;
    bool near_low = false, near_high = false;
    for (const auto& s : traj.samples) {
        const double low = std::abs(s.w - cfg.w_min);
        const double high = std::abs(s.w - cfg.w_max);
        if (low <= margin_threshold) {
            if (!near_low) points.push_back({s.t, CriticalKind::NearLowLimit, low});
            near_low = true;
        } else {
            near_low = false;
        }
        if (high <= margin_threshold) {
            if (!near_high) points.push_back({s.t, CriticalKind::NearHighLimit, high});
            near_high = true;
        } else {
            near_high = false;
        }
    }
    for (const auto& sw : traj.mode_switches) {
        const double margin = std::min(std::abs(sw.w - cfg.w_min), std::abs(sw.w - cfg.w_max));
        points.push_back({sw.t, CriticalKind::ModeSwitch, margin});
    }
    std::sort(points.begin(), points.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.time < b.time; });
    return points;
}

std::optional<ta::Ticks> required_response_bound(const BoilerConfig& cfg, double w_at_stimulus,
                                                 ta::Ticks ticks_per_minute) {
    cfg.validate();
    if (!(cfg.w_min < w_at_stimulus && w_at_stimulus < cfg.w_max)) {
        throw InvalidConfig("stimulus level must lie strictly between the limits");
    }
    if (ticks_per_minute <= 0) throw InvalidConfig("tick resolution must be positive");

    std::optional<double> slack_min;
    if (cfg.vaporization_rate > 0) {
        slack_min = (w_at_stimulus - cfg.w_min) / cfg.vaporization_rate;
    }
    const double fill = cfg.pump_rates[0] + cfg.pump_rates[1] - cfg.vaporization_rate;
    if (fill > 0) {
        const double high = (cfg.w_max - w_at_stimulus) / fill;
        slack_min = slack_min ? std::min(*slack_min, high) : high;
    }
    if (!slack_min) return std::nullopt;

    const double ticks = *slack_min * static_cast<double>(ticks_per_minute);
    return static_cast<ta::Ticks>(std::floor(ticks + 1e-9 * std::max(1.0, ticks)));
}

std::string to_delimited(const Trajectory& traj) {
    std::ostringstream oss;
    oss.precision(12);
    oss << "t\tw\tu1\tu2\tmode\n";
    for (const auto& s : traj.samples) {
        oss << s.t << '\t' << s.w << '\t' << s.u1 << '\t' << s.u2 << '\t' << s.mode << '\n';
    }
    return oss.str();
}

} // namespace timechain::boiler
