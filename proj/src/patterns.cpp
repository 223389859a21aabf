#include "timechain/patterns.hpp"

#include <algorithm>
#include <unordered_set>

#include "timechain/errors.hpp"

namespace timechain::patterns {

using ta::ClockConstraint;
using ta::Edge;
using ta::Location;
using ta::LocationKind;
using ta::Sync;
using ta::SyncDirection;
using ta::Ticks;
using ta::TimedAutomaton;

void DelayBounds::validate() const {
    if (l_bound < 0 || l_bound > u_bound) {
        throw InvalidBounds("delay bounds [" + std::to_string(l_bound) + ", " +
                            std::to_string(u_bound) + "] must satisfy 0 <= l <= u");
    }
}

void PeriodSpec::validate() const {
    if (period <= 0) throw InvalidPeriod("period must be positive");
    if (jit_lb > jit_ub) {
        throw InvalidPeriod("jitter window [" + std::to_string(jit_lb) + ", " +
                            std::to_string(jit_ub) + "] must satisfy jit_lb <= jit_ub");
    }
    if (period + jit_lb <= 0) {
        throw InvalidPeriod("period + jit_lb must be positive");
    }
}

ta::TimedAutomaton atomic_action(const DelayBounds& bounds,
                                 const std::optional<std::string>& in_chan,
                                 const std::optional<std::string>& out_chan,
                                 const std::string& name) {
    bounds.validate();
    TimedAutomaton a;
    a.name = name;
    const std::size_t x = a.add_clock("x");
    a.locations.push_back({kPreId, LocationKind::Pre, {}});
    a.locations.push_back({kActId, LocationKind::Internal,
                           {ClockConstraint::upper(x, bounds.u_bound)}});
    a.locations.push_back({kPostId, LocationKind::Post, {}});
    a.initial = 0;

    Edge entry;
    entry.source = 0;
    entry.target = 1;
    if (in_chan) entry.sync = Sync{*in_chan, SyncDirection::Receive};
    entry.resets = {x};
    a.edges.push_back(std::move(entry));

    Edge exit;
    exit.source = 1;
    exit.target = 2;
    exit.guard = {ClockConstraint::lower(x, bounds.l_bound)};
    if (out_chan) exit.sync = Sync{*out_chan, SyncDirection::Emit};
    a.edges.push_back(std::move(exit));
    return a;
}

namespace {

/// Rename clocks and locations (not channels) with "prefix." for capture-free
/// merging inside one automaton.
TimedAutomaton rename_local(const TimedAutomaton& a, const std::string& prefix) {
    TimedAutomaton out = a;
    for (std::size_t i = 1; i < out.clocks.size(); ++i) {
        out.clocks[i] = prefix + "." + out.clocks[i];
    }
    for (auto& loc : out.locations) loc.id = prefix + "." + loc.id;
    return out;
}

std::string fresh_prefix(const TimedAutomaton& against, const TimedAutomaton& renamed) {
    for (int k = 2;; ++k) {
        const std::string prefix = "s" + std::to_string(k);
        bool clash = false;
        for (std::size_t i = 1; i < renamed.clocks.size() && !clash; ++i) {
            const std::string candidate = prefix + "." + renamed.clocks[i];
            clash = std::find(against.clocks.begin(), against.clocks.end(), candidate) !=
                    against.clocks.end();
        }
        for (const auto& loc : renamed.locations) {
            if (clash) break;
            clash = against.find_location(prefix + "." + loc.id) != nullptr;
        }
        if (!clash) return prefix;
    }
}

void shift_clocks(TimedAutomaton& a, std::size_t offset) {
    auto shift = [offset](std::size_t c) { return c == 0 ? 0 : c + offset; };
    for (auto& loc : a.locations) {
        for (auto& c : loc.invariant) {
            c.left = shift(c.left);
            c.right = shift(c.right);
        }
    }
    for (auto& e : a.edges) {
        for (auto& c : e.guard) {
            c.left = shift(c.left);
            c.right = shift(c.right);
        }
        for (auto& r : e.resets) r = shift(r);
    }
}

std::size_t require_unique(const TimedAutomaton& a, LocationKind kind, const char* role) {
    auto idx = a.unique_location(kind);
    if (!idx) {
        throw NotComposable("automaton '" + a.name + "' lacks a unique " + role + " location");
    }
    return *idx;
}

} // namespace

ta::TimedAutomaton seq_compose(const TimedAutomaton& a, const TimedAutomaton& b) {
    const std::size_t post_a = require_unique(a, LocationKind::Post, "Post");
    const std::size_t pre_b = require_unique(b, LocationKind::Pre, "Pre");
    if (b.initial != pre_b) {
        throw NotComposable("automaton '" + b.name + "' must start in its Pre location");
    }

    TimedAutomaton bp = rename_local(b, fresh_prefix(a, b));
    const std::size_t clock_offset = a.clocks.size() - 1;
    shift_clocks(bp, clock_offset);

    TimedAutomaton out = a;
    out.name = a.name + "+" + b.name;
    for (std::size_t i = 1; i < bp.clocks.size(); ++i) out.add_clock(bp.clocks[i]);

    // The weld keeps a's Post slot but becomes internal and absorbs b's Pre.
    out.locations[post_a].kind = LocationKind::Internal;
    for (const auto& c : bp.locations[pre_b].invariant) {
        out.locations[post_a].invariant.push_back(c);
    }

    // Map b's location indices into the merged automaton.
    std::vector<std::size_t> loc_map(bp.locations.size());
    for (std::size_t i = 0; i < bp.locations.size(); ++i) {
        if (i == pre_b) {
            loc_map[i] = post_a;
        } else {
            loc_map[i] = out.locations.size();
            out.locations.push_back(bp.locations[i]);
        }
    }
    for (auto e : bp.edges) {
        e.source = loc_map[e.source];
        e.target = loc_map[e.target];
        out.edges.push_back(std::move(e));
    }
    out.initial = a.initial;

    // Pin the weld with the second component's first clock (any clock that is
    // reset before use downstream works; b's clocks are by well-formedness).
    std::size_t pin = 0;
    if (bp.clocks.size() > 1) {
        pin = clock_offset + 1;
    } else if (a.clocks.size() > 1) {
        pin = 1;
    }
    if (pin != 0) {
        for (auto& e : out.edges) {
            if (e.target == post_a &&
                std::find(e.resets.begin(), e.resets.end(), pin) == e.resets.end()) {
                e.resets.push_back(pin);
            }
        }
        out.locations[post_a].invariant.push_back(ClockConstraint::upper(pin, 0));
    }
    out.validate();
    return out;
}

ta::TimedAutomaton alt_compose(const TimedAutomaton& a, const TimedAutomaton& b,
                               AltMergeMode mode) {
    const bool merge_pre = mode != AltMergeMode::MergePost;
    const bool merge_post = mode != AltMergeMode::MergePre;

    std::size_t pre_a = 0, pre_b = 0, post_a = 0, post_b = 0;
    if (merge_pre) {
        pre_a = require_unique(a, LocationKind::Pre, "Pre");
        pre_b = require_unique(b, LocationKind::Pre, "Pre");
        if (a.initial != pre_a || b.initial != pre_b) {
            throw NotComposable("alternative composition needs Pre as the initial location");
        }
    }
    if (merge_post) {
        post_a = require_unique(a, LocationKind::Post, "Post");
        post_b = require_unique(b, LocationKind::Post, "Post");
    }

    TimedAutomaton bp = rename_local(b, fresh_prefix(a, b));
    const std::size_t clock_offset = a.clocks.size() - 1;
    shift_clocks(bp, clock_offset);

    TimedAutomaton out = a;
    out.name = a.name + "|" + b.name;
    for (std::size_t i = 1; i < bp.clocks.size(); ++i) out.add_clock(bp.clocks[i]);

    std::vector<std::size_t> loc_map(bp.locations.size());
    for (std::size_t i = 0; i < bp.locations.size(); ++i) {
        if (merge_pre && i == pre_b) {
            loc_map[i] = pre_a;
        } else if (merge_post && i == post_b) {
            loc_map[i] = post_a;
        } else {
            loc_map[i] = out.locations.size();
            out.locations.push_back(bp.locations[i]);
        }
    }
    if (merge_pre) {
        for (const auto& c : bp.locations[pre_b].invariant) {
            out.locations[pre_a].invariant.push_back(c);
        }
    }
    if (merge_post) {
        for (const auto& c : bp.locations[post_b].invariant) {
            out.locations[post_a].invariant.push_back(c);
        }
    }
    for (auto e : bp.edges) {
        e.source = loc_map[e.source];
        e.target = loc_map[e.target];
        out.edges.push_back(std::move(e));
    }
    out.initial = a.initial;
    out.validate();
    return out;
}

std::string Violation::to_string() const {
    return "channel '" + channel + "': " +
           (direction == SyncDirection::Emit ? "emit" : "receive") + " in '" + automaton +
           "' has no matching " +
           (direction == SyncDirection::Emit ? "receive" : "emit") + " in any other member";
}

std::vector<Violation> check_channel_matching(const std::vector<TimedAutomaton>& members) {
    std::vector<Violation> violations;
    auto uses = [](const TimedAutomaton& m, const std::string& channel, SyncDirection dir) {
        for (const auto& e : m.edges) {
            if (e.sync && e.sync->channel == channel && e.sync->direction == dir) return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < members.size(); ++i) {
        std::unordered_set<std::string> reported;
        for (const auto& e : members[i].edges) {
            if (!e.sync) continue;
            const auto dir = e.sync->direction;
            const auto key = e.sync->channel + (dir == SyncDirection::Emit ? "!" : "?");
            if (!reported.insert(key).second) continue;
            const auto opposite = dir == SyncDirection::Emit ? SyncDirection::Receive
                                                             : SyncDirection::Emit;
            bool matched = false;
            for (std::size_t j = 0; j < members.size() && !matched; ++j) {
                if (j != i) matched = uses(members[j], e.sync->channel, opposite);
            }
            if (!matched) violations.push_back({e.sync->channel, dir, members[i].name});
        }
    }
    return violations;
}

ta::Network par_compose(std::vector<TimedAutomaton> members) {
    if (members.empty()) throw NotComposable("parallel composition needs at least one member");
    auto violations = check_channel_matching(members);
    if (!violations.empty()) {
        std::string msg = "channel matching failed:";
        for (const auto& v : violations) msg += "\n  " + v.to_string();
        throw ChannelMismatch(msg);
    }

    ta::Network net;
    std::unordered_set<std::string> names;
    for (auto& m : members) {
        std::string base = m.name.empty() ? "m" : m.name;
        std::string unique = base;
        for (int k = 2; !names.insert(unique).second; ++k) {
            unique = base + "_" + std::to_string(k);
        }
        m.name = unique;
        for (std::size_t c = 1; c < m.clocks.size(); ++c) {
            m.clocks[c] = m.name + "." + m.clocks[c];
        }
        for (const auto& e : m.edges) {
            if (e.sync) net.channels.insert(e.sync->channel);
        }
        net.automata.push_back(std::move(m));
    }
    net.validate();
    return net;
}

namespace {

/// Worst-case Pre-to-Post traversal estimate: longest path over location
/// sojourn caps (tightest upper invariant per location). Nullopt for cyclic
/// bodies, where the estimate is not defined.
std::optional<Ticks> traversal_upper_estimate(const TimedAutomaton& body, std::size_t pre,
                                              std::size_t post) {
    const std::size_t n = body.locations.size();
    std::vector<Ticks> weight(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<Ticks> cap;
        for (const auto& c : body.locations[i].invariant) {
            if (c.right == 0 && !c.bound.is_infinity()) {
                cap = cap ? std::min(*cap, c.bound.value()) : c.bound.value();
            }
        }
        weight[i] = cap.value_or(0);
    }
    // Longest path by DFS with cycle detection.
    std::vector<int> state(n, 0); // 0 unvisited, 1 on stack, 2 done
    std::vector<Ticks> best(n, -1);
    bool cyclic = false;
    auto dfs = [&](auto&& self, std::size_t u) -> Ticks {
        if (state[u] == 1) {
            cyclic = true;
            return 0;
        }
        if (state[u] == 2) return best[u];
        state[u] = 1;
        Ticks b = u == post ? weight[u] : -1;
        for (const auto& e : body.edges) {
            if (e.source != u) continue;
            Ticks sub = self(self, e.target);
            if (sub >= 0) b = std::max(b, weight[u] + sub);
        }
        state[u] = 2;
        best[u] = b;
        return b;
    };
    Ticks result = dfs(dfs, pre);
    if (cyclic || result < 0) return std::nullopt;
    return result;
}

} // namespace

ta::TimedAutomaton wrap_periodic(const TimedAutomaton& body, const PeriodSpec& spec,
                                 std::vector<std::string>* warnings) {
    spec.validate();
    const std::size_t pre = require_unique(body, LocationKind::Pre, "Pre");
    const std::size_t post = require_unique(body, LocationKind::Post, "Post");
    if (body.initial != pre) {
        throw NotComposable("wrapped body must start in its Pre location");
    }

    TimedAutomaton out = body;
    std::string cl_name = "Cl";
    while (std::find(out.clocks.begin(), out.clocks.end(), cl_name) != out.clocks.end()) {
        cl_name += "_";
    }
    const std::size_t cl = out.add_clock(cl_name);

    const Ticks earliest = spec.period + spec.jit_lb;
    const Ticks latest = spec.period + spec.jit_ub;

    const std::size_t idle = out.locations.size();
    out.locations.push_back({kIdleId, LocationKind::Internal,
                             {ClockConstraint::upper(cl, latest)}});
    out.initial = idle;

    Edge dispatch;
    dispatch.source = idle;
    dispatch.target = pre;
    dispatch.guard = {ClockConstraint::lower(cl, earliest)};
    dispatch.resets = {cl};
    out.edges.push_back(std::move(dispatch));

    Edge done;
    done.source = post;
    done.target = idle;
    out.edges.push_back(std::move(done));

    if (warnings) {
        if (auto wcet = traversal_upper_estimate(body, pre, post); wcet && *wcet > earliest) {
            warnings->push_back("body '" + body.name + "' worst-case traversal estimate " +
                                std::to_string(*wcet) + " exceeds the earliest re-activation " +
                                std::to_string(earliest) + "; overruns skip activations");
        }
    }
    out.validate();
    return out;
}

WellFormedness is_well_formed(const TimedAutomaton& a) {
    WellFormedness result;
    auto flag = [&result](std::string msg) {
        result.ok = false;
        result.diagnostics.push_back(std::move(msg));
    };
    try {
        a.validate();
    } catch (const Error& e) {
        flag(e.what());
        return result;
    }

    auto pre = a.unique_location(LocationKind::Pre);
    auto post = a.unique_location(LocationKind::Post);
    if (!pre) flag("no unique Pre location");
    if (!post) flag("no unique Post location");
    if (pre && a.initial != *pre) flag("initial location is not the Pre location");
    if (!pre || !post) return result;

    const std::size_t n = a.locations.size();
    std::vector<bool> fwd(n, false), bwd(n, false);
    auto walk = [&](std::size_t start, std::vector<bool>& seen, bool forward) {
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const auto& e : a.edges) {
                const std::size_t from = forward ? e.source : e.target;
                const std::size_t to = forward ? e.target : e.source;
                if (from == u && !seen[to]) {
                    seen[to] = true;
                    stack.push_back(to);
                }
            }
        }
    };
    walk(*pre, fwd, true);
    walk(*post, bwd, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (!fwd[i]) flag("location '" + a.locations[i].id + "' unreachable from Pre");
        else if (!bwd[i]) flag("location '" + a.locations[i].id + "' cannot reach Post");
    }

    // Must-reset analysis: a clock may appear in a guard or invariant only
    // after it was reset on every path from the initial location.
    const std::size_t nclocks = a.clocks.size();
    const std::uint64_t all = nclocks >= 64 ? ~0ull : (1ull << nclocks) - 1;
    std::vector<std::uint64_t> must(n, all);
    must[a.initial] = 1; // only the reference clock
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : a.edges) {
            std::uint64_t after = must[e.source];
            for (std::size_t r : e.resets) after |= 1ull << r;
            const std::uint64_t met = must[e.target] & after;
            if (met != must[e.target]) {
                must[e.target] = met;
                changed = true;
            }
        }
    }
    auto check_uses = [&](const std::vector<ClockConstraint>& cs, std::uint64_t avail,
                          const std::string& where) {
        for (const auto& c : cs) {
            for (std::size_t clk : {c.left, c.right}) {
                if (clk != 0 && !(avail & (1ull << clk))) {
                    flag("clock '" + a.clocks[clk] + "' used in " + where +
                         " before being reset on every path");
                }
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (!fwd[i]) continue;
        check_uses(a.locations[i].invariant, must[i], "invariant of '" + a.locations[i].id + "'");
    }
    for (const auto& e : a.edges) {
        if (!fwd[e.source]) continue;
        check_uses(e.guard, must[e.source],
                   "guard '" + a.locations[e.source].id + "' -> '" + a.locations[e.target].id + "'");
    }
    return result;
}

} // namespace timechain::patterns
