#pragma once

#include <optional>
#include <string>
#include <vector>

#include "timechain/ta.hpp"

namespace timechain::patterns {

/// Delay window of one atomic action, in ticks.
struct DelayBounds {
    ta::Ticks l_bound = 0;
    ta::Ticks u_bound = 0;

    void validate() const; // throws InvalidBounds unless 0 <= l <= u
};

/// Periodic activation: nominal period plus an activation jitter window.
/// jit_lb may be negative (early activation) as long as period + jit_lb > 0.
struct PeriodSpec {
    ta::Ticks period = 0;
    ta::Ticks jit_lb = 0;
    ta::Ticks jit_ub = 0;

    void validate() const; // throws InvalidPeriod
};

enum class AltMergeMode { MergePre, MergePost, MergeBoth };

/// Interface location ids used by the constructors.
inline constexpr const char* kPreId = "Pre";
inline constexpr const char* kActId = "Act";
inline constexpr const char* kPostId = "Post";
inline constexpr const char* kIdleId = "Idle";

/// Three-location delay pattern Pre -> Act -> Post with one local clock:
/// entry resets the clock (receiving in_chan if given), Act holds at most
/// u_bound, exit requires at least l_bound (emitting out_chan if given).
ta::TimedAutomaton atomic_action(const DelayBounds& bounds,
                                 const std::optional<std::string>& in_chan,
                                 const std::optional<std::string>& out_chan,
                                 const std::string& name = "atomic");

/// Location-merging sequential composition: Post(a) and Pre(b) become one
/// location, rewired and pinned so the hand-over is instantaneous. Clocks and
/// locations of b are renamed to avoid capture; channels are kept.
ta::TimedAutomaton seq_compose(const ta::TimedAutomaton& a, const ta::TimedAutomaton& b);

/// Alternative composition; the mode selects which interface locations merge.
ta::TimedAutomaton alt_compose(const ta::TimedAutomaton& a, const ta::TimedAutomaton& b,
                               AltMergeMode mode = AltMergeMode::MergeBoth);

/// Unmatched synchronization in a would-be parallel composition.
struct Violation {
    std::string channel;
    ta::SyncDirection direction;
    std::string automaton;

    std::string to_string() const;
};

/// Every emit needs a receive in some other member, and vice versa.
std::vector<Violation> check_channel_matching(const std::vector<ta::TimedAutomaton>& members);

/// Parallel composition: members with clock names made disjoint, channels
/// collected; the state-space product stays lazy (built by the verifier).
/// Throws ChannelMismatch when check_channel_matching reports violations.
ta::Network par_compose(std::vector<ta::TimedAutomaton> members);

/// Periodic dispatch around a body with unique Pre/Post: an auxiliary clock
/// is reset on each activation, successive activations are separated by
/// [period + jit_lb, period + jit_ub]. The body is not re-activated while it
/// runs; a warning is appended when its worst-case traversal estimate exceeds
/// period + jit_lb.
ta::TimedAutomaton wrap_periodic(const ta::TimedAutomaton& body, const PeriodSpec& spec,
                                 std::vector<std::string>* warnings = nullptr);

struct WellFormedness {
    bool ok = true;
    std::vector<std::string> diagnostics;
};

/// Structural check that the automaton looks pattern-derived: one Pre (the
/// initial location), one Post, every location on some Pre-to-Post path, and
/// every clock reset before use on every path.
WellFormedness is_well_formed(const ta::TimedAutomaton& a);

} // namespace timechain::patterns
