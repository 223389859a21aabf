#include "timechain/verifier.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <random>

#include "timechain/errors.hpp"

namespace timechain::verify {

using ta::Ticks;
using zone::Bound;
using zone::Zone;

void Query::validate() const {
    if (bound_d < 0) throw InvalidConfig("query bound must be non-negative");
}

ExploreContext::ExploreContext(const ta::Network& net, const Query& query)
    : net_(&net),
      layout_(net, /*extra_clocks=*/1),
      stimulus_(query.stimulus, net),
      response_(query.response, net),
      bound_(query.bound_d) {
    query.validate();
    net.validate();

    max_consts_.assign(layout_.dim, 0);
    auto feed = [this](std::size_t ai, const std::vector<ta::ClockConstraint>& cs) {
        for (const auto& c : cs) {
            if (c.bound.is_infinity()) continue;
            const std::int64_t magnitude = std::abs(c.bound.value());
            for (std::size_t clk : {c.left, c.right}) {
                if (clk == 0) continue;
                const std::size_t g = layout_.global(ai, clk);
                max_consts_[g] = std::max(max_consts_[g], magnitude);
            }
        }
    };
    for (std::size_t ai = 0; ai < net.automata.size(); ++ai) {
        for (const auto& loc : net.automata[ai].locations) feed(ai, loc.invariant);
        for (const auto& e : net.automata[ai].edges) feed(ai, e.guard);
    }
    max_consts_[monitor_clock()] = bound_;

    clock_names_ = layout_.clock_names;
    clock_names_.push_back("z");
}

bool ExploreContext::stimulus_holds(const std::vector<std::size_t>& locs) const {
    return stimulus_.eval(locs);
}

bool ExploreContext::response_holds(const std::vector<std::size_t>& locs) const {
    return response_.eval(locs);
}

Zone ExploreContext::intersect_invariants(Zone z, const std::vector<std::size_t>& locs) const {
    for (std::size_t ai = 0; ai < net_->automata.size(); ++ai) {
        for (const auto& c : net_->automata[ai].locations[locs[ai]].invariant) {
            z = z.constrain(layout_.global(ai, c.left), layout_.global(ai, c.right), c.bound);
            if (z.empty()) return z;
        }
    }
    return z;
}

std::pair<MonitorMode, Zone> ExploreContext::monitor_entry(MonitorMode mode,
                                                           const std::vector<std::size_t>& locs,
                                                           Zone z) const {
    const std::size_t zc = monitor_clock();
    if (mode == MonitorMode::Idle && stimulus_.eval(locs)) {
        mode = MonitorMode::Armed;
        const std::size_t resets[] = {zc};
        z = z.reset(resets);
    }
    if (mode == MonitorMode::Armed && response_.eval(locs)) {
        mode = MonitorMode::Idle;
    }
    if (mode == MonitorMode::Idle) {
        // z is meaningful only while armed; forgetting it keeps idle states
        // comparable across periods.
        z = z.free(zc);
    }
    return {mode, std::move(z)};
}

SymbolicState ExploreContext::initial_state() const {
    SymbolicState s;
    for (const auto& a : net_->automata) s.locations.push_back(a.initial);
    Zone z = intersect_invariants(Zone::zero(layout_.dim), s.locations);
    if (z.empty()) {
        s.mode = MonitorMode::Idle;
        s.zone = z;
        return s;
    }
    auto [mode, zm] = monitor_entry(MonitorMode::Idle, s.locations, std::move(z));
    s.mode = mode;
    s.zone = zm.extrapolate(max_consts_);
    return s;
}

Zone ExploreContext::delayed_zone(const SymbolicState& s) const {
    return intersect_invariants(s.zone.up(), s.locations);
}

Zone ExploreContext::violation_zone(const SymbolicState& s) const {
    const Zone delayed = delayed_zone(s);
    if (s.mode != MonitorMode::Armed) return Zone(1).constrain(0, 0, Bound::strict(-1));
    // z > bound:  0 - z < -bound
    return delayed.constrain(0, monitor_clock(), Bound::strict(-bound_));
}

bool ExploreContext::time_bounded(const Zone& delayed) const {
    for (std::size_t i = 1; i < delayed.dim(); ++i) {
        if (!delayed.at(i, 0).is_infinity()) return true;
    }
    return false;
}

std::vector<std::pair<ta::EdgeStep, SymbolicState>>
ExploreContext::successors(const SymbolicState& s) const {
    std::vector<std::pair<ta::EdgeStep, SymbolicState>> out;
    const Zone delayed = delayed_zone(s);
    if (delayed.empty()) return out;

    for (const auto& step : ta::enabled_edges(*net_, s.locations, delayed, layout_)) {
        const auto& a = net_->automata[step.automaton];
        const auto& e = a.edges[step.edge];

        Zone z = delayed;
        std::vector<std::size_t> resets;
        auto apply_edge = [&](std::size_t ai, const ta::Edge& edge) {
            for (const auto& c : edge.guard) {
                z = z.constrain(layout_.global(ai, c.left), layout_.global(ai, c.right), c.bound);
                if (z.empty()) return;
            }
            for (std::size_t r : edge.resets) resets.push_back(layout_.global(ai, r));
        };
        apply_edge(step.automaton, e);
        if (z.empty()) continue;

        std::vector<std::size_t> locs = s.locations;
        locs[step.automaton] = e.target;
        if (step.receive) {
            const auto& recv = net_->automata[step.receive->first].edges[step.receive->second];
            apply_edge(step.receive->first, recv);
            if (z.empty()) continue;
            locs[step.receive->first] = recv.target;
        }
        if (!resets.empty()) z = z.reset(resets);
        z = intersect_invariants(std::move(z), locs);
        if (z.empty()) continue;

        auto [mode, zm] = monitor_entry(s.mode, locs, std::move(z));
        SymbolicState next;
        next.locations = std::move(locs);
        next.mode = mode;
        next.zone = zm.extrapolate(max_consts_);
        out.emplace_back(step, std::move(next));
    }
    return out;
}

std::vector<SymbolicState> successors(const SymbolicState& s, const ExploreContext& ctx) {
    std::vector<SymbolicState> out;
    for (auto& [step, state] : ctx.successors(s)) out.push_back(std::move(state));
    return out;
}

namespace {

struct Node {
    SymbolicState state;
    std::ptrdiff_t parent = -1;
    std::optional<ta::EdgeStep> via;
};

std::vector<TraceStep> build_trace(const std::vector<Node>& arena, std::ptrdiff_t leaf,
                                   const ExploreContext& ctx) {
    std::vector<std::ptrdiff_t> path;
    for (std::ptrdiff_t i = leaf; i >= 0; i = arena[i].parent) path.push_back(i);
    std::reverse(path.begin(), path.end());

    std::vector<TraceStep> trace;
    for (std::ptrdiff_t i : path) {
        const Node& n = arena[i];
        TraceStep step;
        step.step = n.via;
        step.description = n.via ? ta::describe_step(ctx.net(), *n.via) : "initial state";
        if (n.state.mode == MonitorMode::Armed) step.description += " [armed]";
        step.zone_text = n.state.zone.to_string(ctx.clock_names());
        trace.push_back(std::move(step));
    }
    return trace;
}

} // namespace

Verdict explore(const ta::Network& net, const Query& query, const ExploreLimits& limits) {
    ExploreContext ctx(net, query);
    Verdict verdict;
    if (query.stimulus == query.response) {
        verdict.warnings.push_back("stimulus and response are the same formula");
    }

    std::vector<Node> arena;
    std::deque<std::size_t> waiting;
    std::map<std::pair<std::vector<std::size_t>, MonitorMode>, std::vector<Zone>> passed;
    std::mt19937_64 rng(limits.seed);

    auto violated = [&](std::ptrdiff_t node, std::string reason, const Zone& witness) {
        verdict.kind = Verdict::Kind::Violated;
        verdict.violation_reason = std::move(reason);
        verdict.trace = build_trace(arena, node, ctx);
        TraceStep last;
        last.description = "violation: " + verdict.violation_reason;
        last.zone_text = witness.to_string(ctx.clock_names());
        verdict.trace.push_back(std::move(last));
        return verdict;
    };

    auto is_subsumed = [&](const SymbolicState& s) {
        auto it = passed.find({s.locations, s.mode});
        if (it == passed.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(),
                           [&](const Zone& p) { return p.includes(s.zone); });
    };

    {
        SymbolicState init = ctx.initial_state();
        if (init.zone.empty()) {
            verdict.warnings.push_back("initial invariants are unsatisfiable; model has no runs");
            return verdict;
        }
        arena.push_back({std::move(init), -1, std::nullopt});
        verdict.states_generated = 1;
        const Zone bad = ctx.violation_zone(arena[0].state);
        if (!bad.empty()) {
            return violated(0, "response bound exceedable after stimulus", bad);
        }
        waiting.push_back(0);
    }

    while (!waiting.empty()) {
        std::size_t idx = waiting.front();
        switch (limits.order) {
            case ExploreOrder::Bfs:
                idx = waiting.front();
                waiting.pop_front();
                break;
            case ExploreOrder::Dfs:
                idx = waiting.back();
                waiting.pop_back();
                break;
            case ExploreOrder::Random: {
                std::uniform_int_distribution<std::size_t> pick(0, waiting.size() - 1);
                const std::size_t at = pick(rng);
                idx = waiting[at];
                waiting[at] = waiting.back();
                waiting.pop_back();
                break;
            }
        }
        const SymbolicState& s = arena[idx].state;
        if (is_subsumed(s)) continue;

        if (verdict.states_explored >= limits.max_states) {
            verdict.kind = Verdict::Kind::ResourceExhausted;
            return verdict;
        }
        ++verdict.states_explored;

        const Zone delayed = ctx.delayed_zone(s);
        if (s.mode == MonitorMode::Armed) {
            const Zone bad = delayed.constrain(0, ctx.monitor_clock(),
                                               Bound::strict(-ctx.bound()));
            if (!bad.empty()) {
                return violated(static_cast<std::ptrdiff_t>(idx),
                                "response bound exceedable after stimulus", bad);
            }
        }

        auto succ = ctx.successors(s);
        if (succ.empty()) {
            if (ctx.time_bounded(delayed)) {
                ++verdict.timelocks;
                if (s.mode == MonitorMode::Armed) {
                    return violated(static_cast<std::ptrdiff_t>(idx),
                                    "armed timelock: time cannot progress and no edge is enabled",
                                    delayed);
                }
            }
            // Unbounded delay with no moves: the run diverges quietly; an
            // armed divergence was already caught by the bound check above.
        }

        auto key = std::make_pair(s.locations, s.mode);
        auto& bucket = passed[key];
        std::erase_if(bucket, [&](const Zone& p) { return s.zone.includes(p); });
        bucket.push_back(s.zone);

        for (auto& [step, next] : succ) {
            ++verdict.states_generated;
            arena.push_back({std::move(next), static_cast<std::ptrdiff_t>(idx), step});
            const std::ptrdiff_t nidx = static_cast<std::ptrdiff_t>(arena.size() - 1);
            const SymbolicState& ns = arena[nidx].state;

            // The bound check precedes subsumption so a subsumed-but-violating
            // zone is never dropped.
            if (ns.mode == MonitorMode::Armed) {
                const Zone bad = ns.zone.constrain(0, ctx.monitor_clock(),
                                                   Bound::strict(-ctx.bound()));
                if (!bad.empty()) {
                    return violated(nidx, "response bound exceedable after stimulus", bad);
                }
            }
            if (is_subsumed(ns)) {
                arena.pop_back();
                --verdict.states_generated;
                continue;
            }
            waiting.push_back(static_cast<std::size_t>(nidx));
        }
    }
    verdict.kind = Verdict::Kind::Satisfied;
    return verdict;
}

ResponseBound worst_case_response(const ta::Network& net, const StateFormula& stimulus,
                                  const StateFormula& response, ta::Ticks cap,
                                  const ExploreLimits& limits) {
    auto check = [&](Ticks d) {
        Verdict v = explore(net, Query{stimulus, response, d}, limits);
        if (v.kind == Verdict::Kind::ResourceExhausted) {
            throw ResourceExhaustedError("state cap hit while searching for the worst case");
        }
        return v.kind == Verdict::Kind::Satisfied;
    };
    if (!check(cap)) return Unbounded{};
    Ticks lo = 0, hi = cap;
    while (lo < hi) {
        const Ticks mid = lo + (hi - lo) / 2;
        if (check(mid)) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

} // namespace timechain::verify
