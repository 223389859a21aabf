#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "timechain/formula.hpp"
#include "timechain/ta.hpp"
#include "timechain/zone.hpp"

namespace timechain::verify {

/// Bounded leads-to query: every state satisfying the stimulus must be
/// followed by a response-satisfying state within bound_d ticks on every
/// progressing run.
struct Query {
    StateFormula stimulus;
    StateFormula response;
    ta::Ticks bound_d = 0;

    void validate() const; // throws InvalidConfig on bound_d < 0
};

enum class MonitorMode { Idle, Armed };

/// Node of the exploration graph: location vector, response monitor mode,
/// and the zone over all network clocks plus the monitor clock z (last index).
struct SymbolicState {
    std::vector<std::size_t> locations;
    MonitorMode mode = MonitorMode::Idle;
    zone::Zone zone;
};

enum class ExploreOrder { Bfs, Dfs, Random };

struct ExploreLimits {
    std::size_t max_states = 1'000'000; // states expanded before giving up
    ExploreOrder order = ExploreOrder::Bfs;
    std::uint64_t seed = 1;
};

struct TraceStep {
    std::string description;
    std::string zone_text;
    std::optional<ta::EdgeStep> step; // absent for the initial state entry
};

struct Verdict {
    enum class Kind { Satisfied, Violated, ResourceExhausted };

    Kind kind = Kind::Satisfied;
    std::vector<TraceStep> trace; // Violated only; replayable from the initial state
    std::string violation_reason;
    std::size_t states_explored = 0;
    std::size_t states_generated = 0;
    std::size_t timelocks = 0;
    std::vector<std::string> warnings;
};

/// Everything the successor relation needs, resolved once per query:
/// global clock layout (monitor clock appended), compiled formulas, and the
/// per-clock extrapolation constants.
class ExploreContext {
public:
    ExploreContext(const ta::Network& net, const Query& query);

    const ta::Network& net() const { return *net_; }
    const ta::NetworkLayout& layout() const { return layout_; }
    std::size_t monitor_clock() const { return layout_.dim - 1; }
    ta::Ticks bound() const { return bound_; }
    const std::vector<std::string>& clock_names() const { return clock_names_; }

    SymbolicState initial_state() const;

    /// Delay-then-act successors with the monitor rules applied and zones
    /// extrapolated; the complete set for the given state.
    std::vector<std::pair<ta::EdgeStep, SymbolicState>> successors(const SymbolicState& s) const;

    /// Delayed zone (up + invariants) of a state; what time alone can reach.
    zone::Zone delayed_zone(const SymbolicState& s) const;

    /// Part of the delayed zone past the bound (Armed states), empty if safe.
    zone::Zone violation_zone(const SymbolicState& s) const;

    /// True when the delayed zone cannot diverge (some clock stays bounded).
    bool time_bounded(const zone::Zone& delayed) const;

    bool stimulus_holds(const std::vector<std::size_t>& locations) const;
    bool response_holds(const std::vector<std::size_t>& locations) const;

private:
    friend Verdict explore(const ta::Network&, const Query&, const ExploreLimits&);

    zone::Zone intersect_invariants(zone::Zone z, const std::vector<std::size_t>& locs) const;
    std::pair<MonitorMode, zone::Zone> monitor_entry(MonitorMode mode,
                                                     const std::vector<std::size_t>& locs,
                                                     zone::Zone z) const;

    const ta::Network* net_;
    ta::NetworkLayout layout_;
    CompiledFormula stimulus_;
    CompiledFormula response_;
    ta::Ticks bound_;
    std::vector<std::int64_t> max_consts_;
    std::vector<std::string> clock_names_;
};

/// Forward symbolic reachability with passed/waiting lists, inclusion
/// subsumption and extrapolation; the monitor semantics are woven into the
/// successor computation. Satisfied iff the state space is exhausted without
/// a violation.
Verdict explore(const ta::Network& net, const Query& query, const ExploreLimits& limits = {});

/// Spec-level successor op: the monitor-instrumented successor states.
std::vector<SymbolicState> successors(const SymbolicState& s, const ExploreContext& ctx);

struct Unbounded {
    bool operator==(const Unbounded&) const = default;
};
using ResponseBound = std::variant<ta::Ticks, Unbounded>;

/// Minimal d with explore(net, {stimulus, response, d}) Satisfied, found by
/// binary search; Unbounded if no d <= cap works. Throws
/// ResourceExhaustedError when exploration hits the state cap.
ResponseBound worst_case_response(const ta::Network& net, const StateFormula& stimulus,
                                  const StateFormula& response, ta::Ticks cap = 1'000'000,
                                  const ExploreLimits& limits = {});

} // namespace timechain::verify
