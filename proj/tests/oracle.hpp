#pragma once

// Brute-force reference implementations used by the tests. Everything here
// works on explicit integer valuations and stays independent of the zone
// engine and the symbolic explorer it checks.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "timechain/formula.hpp"
#include "timechain/jitter.hpp"
#include "timechain/ta.hpp"
#include "timechain/verifier.hpp"
#include "timechain/zone.hpp"

namespace oracle {

using timechain::ta::Network;
using timechain::ta::Ticks;
using timechain::ta::TimedAutomaton;

// --- discrete-time executor -------------------------------------------------

/// All achievable traversal durations of a channel-free automaton: time from
/// the first edge out of the initial location to the first entry of a
/// Post-kind location. Durations above `time_cap` are discarded.
std::set<Ticks> traversal_times(const TimedAutomaton& a, Ticks time_cap);

/// Separations between consecutive firings of the dispatch edge (the unique
/// edge leaving the initial location) over runs with up to `activations`
/// dispatches.
std::set<Ticks> dispatch_separations(const TimedAutomaton& wrapped, int activations,
                                     Ticks separation_cap);

// --- discrete-time bounded-response model checker ----------------------------

struct CheckResult {
    bool ever_armed = false;
    Ticks max_armed_z = 0; // saturates at z_cap
    Ticks min_response = INT64_MAX; // smallest z seen at a discharge
    bool armed_stuck = false;
    Ticks z_cap = 0;

    /// Verdict of the bounded leads-to for a given bound d <= z_cap - 1.
    bool violated(Ticks d) const { return armed_stuck || max_armed_z > d; }
};

/// Exhaustive integer-granularity run enumeration with the same monitor rules
/// as the explorer: arm on entering stimulus while idle, discharge on
/// response, track the oldest unanswered stimulus.
CheckResult discrete_check(const Network& net, const timechain::verify::StateFormula& stimulus,
                           const timechain::verify::StateFormula& response, Ticks z_cap,
                           std::size_t state_cap = 4'000'000);

// --- explicit-valuation zone oracle ------------------------------------------

/// Zone as the explicit set of integer clock valuations over [0, G]^(dim-1).
class GridZone {
public:
    GridZone(std::size_t dim, std::int64_t grid_max);

    /// Valuations of `z` restricted to the grid box.
    static GridZone from_zone(const timechain::zone::Zone& z, std::int64_t grid_max);

    std::size_t dim() const { return dim_; }
    bool empty() const;
    bool includes(const GridZone& other) const;
    bool operator==(const GridZone& other) const { return member_ == other.member_; }

    GridZone up() const;
    GridZone constrain(std::size_t i, std::size_t j, timechain::zone::Bound b) const;
    GridZone reset(const std::vector<std::size_t>& clocks) const;

private:
    bool satisfies(const std::vector<std::int64_t>& v, std::size_t i, std::size_t j,
                   timechain::zone::Bound b) const;
    void for_each(const std::function<void(std::vector<std::int64_t>&, std::size_t)>& fn) const;

    std::size_t dim_;
    std::int64_t grid_;
    std::vector<char> member_;
};

// --- trace replay ----------------------------------------------------------------

/// Replays a Violated verdict's trace through the engine's own successor
/// relation and confirms the final state still witnesses the violation
/// (z past the bound, or an armed timelock).
bool trace_replays(const Network& net, const timechain::verify::Query& query,
                   const timechain::verify::Verdict& verdict);

// --- structure comparison -----------------------------------------------------

/// Timed-automaton isomorphism ignoring all names: a bijection on locations
/// and one on clocks that identifies initial locations, kinds, invariants,
/// edges, guards, syncs and resets.
bool isomorphic(const TimedAutomaton& a, const TimedAutomaton& b);

// --- random model generation ---------------------------------------------------

struct ChainSpec {
    timechain::jitter::TimeChain chain;
    Ticks upper_sum = 0; // sum of component max jitters
    Ticks lower_sum = 0;
};

/// Random event-triggered chain (optionally with a periodic head whose period
/// is slack enough to avoid backpressure), bounds <= max_bound per component.
ChainSpec random_chain(std::mt19937_64& rng, int max_len, Ticks max_bound,
                       bool allow_periodic_head);

} // namespace oracle
