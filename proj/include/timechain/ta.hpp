#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "timechain/zone.hpp"

namespace timechain::ta {

/// Model time is counted in integer ticks; the tick-to-wallclock resolution
/// is configuration, not part of the model.
using Ticks = std::int64_t;

/// Conjunct of a guard or invariant: left - right (<= | <) bound.
/// Clock index 0 is the constant-zero reference clock, so "x <= 5" is
/// (x, 0, <=5) and "x >= 2" is (0, x, <=-2).
struct ClockConstraint {
    std::size_t left = 0;
    std::size_t right = 0;
    zone::Bound bound;

    static ClockConstraint upper(std::size_t clock, Ticks value, bool strict = false) {
        return {clock, 0, strict ? zone::Bound::strict(value) : zone::Bound::nonstrict(value)};
    }
    static ClockConstraint lower(std::size_t clock, Ticks value, bool strict = false) {
        return {0, clock, strict ? zone::Bound::strict(-value) : zone::Bound::nonstrict(-value)};
    }

    bool operator==(const ClockConstraint&) const = default;
};

enum class LocationKind { Pre, Post, Internal };

struct Location {
    std::string id;
    LocationKind kind = LocationKind::Internal;
    std::vector<ClockConstraint> invariant;
};

enum class SyncDirection { Emit, Receive };

struct Sync {
    std::string channel;
    SyncDirection direction = SyncDirection::Emit;

    bool operator==(const Sync&) const = default;
    std::string to_string() const {
        return channel + (direction == SyncDirection::Emit ? "!" : "?");
    }
};

struct Edge {
    std::size_t source = 0; // location indices
    std::size_t target = 0;
    std::vector<ClockConstraint> guard;
    std::optional<Sync> sync;
    std::vector<std::size_t> resets; // clock indices; never the reference clock
};

/// One timed automaton. Immutable once built (construction is single-writer);
/// composition operators return new automata.
struct TimedAutomaton {
    std::string name;
    std::vector<Location> locations;
    std::vector<Edge> edges;
    /// Clock display names; index 0 is the reference clock, named "0".
    std::vector<std::string> clocks{"0"};
    std::size_t initial = 0;

    std::size_t location_index(std::string_view id) const; // throws UnknownName
    const Location* find_location(std::string_view id) const;
    std::size_t clock_index(std::string_view name) const; // throws UnknownName
    std::size_t add_clock(std::string name);

    /// Unique location of the given kind, or nullopt if absent/ambiguous.
    std::optional<std::size_t> unique_location(LocationKind kind) const;

    /// Graph consistency, name uniqueness, reference-clock rules.
    /// Throws MalformedNetwork on violation.
    void validate() const;
};

/// Parallel composition result: an ordered list of automata plus the set of
/// channels they synchronize on. The product is never built eagerly.
struct Network {
    std::vector<TimedAutomaton> automata;
    std::set<std::string> channels;

    std::size_t automaton_index(std::string_view name) const; // throws UnknownName
    void validate() const;
};

/// Prefixes every clock, location, and channel name with "prefix.".
/// Structure is otherwise isomorphic.
TimedAutomaton namespace_automaton(const TimedAutomaton& a, const std::string& prefix);

/// Layout of a network's clocks in one global zone: member i's local clock
/// j >= 1 maps to a dense global index; index 0 stays the reference clock.
/// Extra trailing clocks (e.g. a monitor clock) can be appended.
struct NetworkLayout {
    explicit NetworkLayout(const Network& net, std::size_t extra_clocks = 0);

    std::size_t dim = 1;
    std::vector<std::size_t> offsets;     // per automaton
    std::vector<std::string> clock_names; // per global index, for rendering

    std::size_t global(std::size_t automaton, std::size_t local_clock) const {
        return local_clock == 0 ? 0 : offsets[automaton] + local_clock - 1;
    }

    /// Per-channel edge sites, for handshake pairing.
    struct ChannelSites {
        std::vector<std::pair<std::size_t, std::size_t>> emits;    // (automaton, edge)
        std::vector<std::pair<std::size_t, std::size_t>> receives;
    };
    std::vector<std::pair<std::string, ChannelSites>> channel_sites;
    const ChannelSites* sites(std::string_view channel) const;
};

/// One enabled move: either an internal edge or a matched emit/receive pair.
struct EdgeStep {
    std::size_t automaton = 0; // emitter for sync steps
    std::size_t edge = 0;
    std::optional<std::pair<std::size_t, std::size_t>> receive; // (automaton, edge)

    bool is_sync() const { return receive.has_value(); }
    bool operator==(const EdgeStep&) const = default;
};

/// Moves whose guard (conjoined guards, for handshakes) intersects the zone.
/// Throws MalformedNetwork if an emit edge has no receive partner anywhere
/// else in the network.
std::vector<EdgeStep> enabled_edges(const Network& net,
                                    const std::vector<std::size_t>& locations,
                                    const zone::Zone& z,
                                    const NetworkLayout& layout);

/// Human-readable step label, e.g. "sensor: Act -> Post (smp!)".
std::string describe_step(const Network& net, const EdgeStep& step);

} // namespace timechain::ta
