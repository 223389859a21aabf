#include "timechain/ta.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "timechain/errors.hpp"

namespace timechain::ta {

std::size_t TimedAutomaton::location_index(std::string_view id) const {
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (locations[i].id == id) return i;
    }
    throw UnknownName("no location '" + std::string(id) + "' in automaton '" + name + "'");
}

const Location* TimedAutomaton::find_location(std::string_view id) const {
    for (const auto& loc : locations) {
        if (loc.id == id) return &loc;
    }
    return nullptr;
}

std::size_t TimedAutomaton::clock_index(std::string_view clock) const {
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        if (clocks[i] == clock) return i;
    }
    throw UnknownName("no clock '" + std::string(clock) + "' in automaton '" + name + "'");
}

std::size_t TimedAutomaton::add_clock(std::string clock) {
    clocks.push_back(std::move(clock));
    return clocks.size() - 1;
}

std::optional<std::size_t> TimedAutomaton::unique_location(LocationKind kind) const {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (locations[i].kind != kind) continue;
        if (found) return std::nullopt;
        found = i;
    }
    return found;
}

namespace {

void check_constraints(const TimedAutomaton& a, const std::vector<ClockConstraint>& cs,
                       const std::string& where) {
    for (const auto& c : cs) {
        if (c.left >= a.clocks.size() || c.right >= a.clocks.size()) {
            throw MalformedNetwork("constraint references unknown clock in " + where);
        }
        if (c.left == c.right) {
            throw MalformedNetwork("constraint relates a clock to itself in " + where);
        }
    }
}

} // namespace

void TimedAutomaton::validate() const {
    if (locations.empty()) throw MalformedNetwork("automaton '" + name + "' has no locations");
    if (initial >= locations.size()) {
        throw MalformedNetwork("automaton '" + name + "' has out-of-range initial location");
    }
    if (clocks.empty() || clocks[0] != "0") {
        throw MalformedNetwork("automaton '" + name + "' must keep clock 0 as the reference clock");
    }
    std::unordered_set<std::string> seen;
    for (const auto& loc : locations) {
        if (!seen.insert(loc.id).second) {
            throw MalformedNetwork("duplicate location id '" + loc.id + "' in '" + name + "'");
        }
        check_constraints(*this, loc.invariant, "invariant of " + loc.id);
    }
    seen.clear();
    for (const auto& c : clocks) {
        if (!seen.insert(c).second) {
            throw MalformedNetwork("duplicate clock name '" + c + "' in '" + name + "'");
        }
    }
    for (const auto& e : edges) {
        if (e.source >= locations.size() || e.target >= locations.size()) {
            throw MalformedNetwork("edge references unknown location in '" + name + "'");
        }
        check_constraints(*this, e.guard, "guard in " + name);
        for (std::size_t r : e.resets) {
            if (r == 0) throw MalformedNetwork("edge resets the reference clock in '" + name + "'");
            if (r >= clocks.size()) {
                throw MalformedNetwork("edge resets unknown clock in '" + name + "'");
            }
        }
    }
}

std::size_t Network::automaton_index(std::string_view automaton) const {
    for (std::size_t i = 0; i < automata.size(); ++i) {
        if (automata[i].name == automaton) return i;
    }
    throw UnknownName("no automaton '" + std::string(automaton) + "' in network");
}

void Network::validate() const {
    std::unordered_set<std::string> names;
    for (const auto& a : automata) {
        a.validate();
        if (!names.insert(a.name).second) {
            throw MalformedNetwork("duplicate automaton name '" + a.name + "' in network");
        }
    }
}

TimedAutomaton namespace_automaton(const TimedAutomaton& a, const std::string& prefix) {
    if (prefix.empty()) throw Error("namespace prefix must be non-empty");
    TimedAutomaton out = a;
    out.name = prefix + "." + a.name;
    for (std::size_t i = 1; i < out.clocks.size(); ++i) {
        out.clocks[i] = prefix + "." + out.clocks[i];
    }
    for (auto& loc : out.locations) loc.id = prefix + "." + loc.id;
    for (auto& e : out.edges) {
        if (e.sync) e.sync->channel = prefix + "." + e.sync->channel;
    }
    return out;
}

NetworkLayout::NetworkLayout(const Network& net, std::size_t extra_clocks) {
    clock_names.push_back("0");
    for (const auto& a : net.automata) {
        offsets.push_back(dim);
        dim += a.clocks.size() - 1;
        for (std::size_t c = 1; c < a.clocks.size(); ++c) clock_names.push_back(a.clocks[c]);
    }
    dim += extra_clocks;

    std::vector<std::string> channels;
    for (std::size_t ai = 0; ai < net.automata.size(); ++ai) {
        const auto& a = net.automata[ai];
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const auto& sync = a.edges[ei].sync;
            if (!sync) continue;
            auto it = std::find(channels.begin(), channels.end(), sync->channel);
            if (it == channels.end()) {
                channels.push_back(sync->channel);
                channel_sites.emplace_back(sync->channel, ChannelSites{});
                it = channels.end() - 1;
            }
            auto& sites = channel_sites[static_cast<std::size_t>(it - channels.begin())].second;
            if (sync->direction == SyncDirection::Emit) {
                sites.emits.emplace_back(ai, ei);
            } else {
                sites.receives.emplace_back(ai, ei);
            }
        }
    }
}

const NetworkLayout::ChannelSites* NetworkLayout::sites(std::string_view channel) const {
    for (const auto& [name, s] : channel_sites) {
        if (name == channel) return &s;
    }
    return nullptr;
}

namespace {

zone::Zone apply_guard(const zone::Zone& z, const TimedAutomaton& a, std::size_t ai,
                       const std::vector<ClockConstraint>& guard, const NetworkLayout& layout) {
    (void)a;
    zone::Zone out = z;
    for (const auto& c : guard) {
        out = out.constrain(layout.global(ai, c.left), layout.global(ai, c.right), c.bound);
        if (out.empty()) break;
    }
    return out;
}

} // namespace

std::vector<EdgeStep> enabled_edges(const Network& net,
                                    const std::vector<std::size_t>& locations,
                                    const zone::Zone& z,
                                    const NetworkLayout& layout) {
    if (locations.size() != net.automata.size()) {
        throw MalformedNetwork("location vector length does not match network size");
    }
    std::vector<EdgeStep> steps;
    for (std::size_t ai = 0; ai < net.automata.size(); ++ai) {
        const auto& a = net.automata[ai];
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const auto& e = a.edges[ei];
            if (e.source != locations[ai]) continue;
            if (!e.sync) {
                if (!apply_guard(z, a, ai, e.guard, layout).empty()) {
                    steps.push_back({ai, ei, std::nullopt});
                }
                continue;
            }
            if (e.sync->direction != SyncDirection::Emit) continue;

            const auto* sites = layout.sites(e.sync->channel);
            bool partner_exists = false;
            if (sites) {
                for (const auto& [rai, rei] : sites->receives) {
                    if (rai != ai) { partner_exists = true; break; }
                }
            }
            if (!partner_exists) {
                throw MalformedNetwork("emit on channel '" + e.sync->channel +
                                       "' in '" + a.name + "' has no receive partner");
            }
            for (const auto& [rai, rei] : sites->receives) {
                if (rai == ai) continue;
                const auto& recv = net.automata[rai].edges[rei];
                if (recv.source != locations[rai]) continue;
                zone::Zone joint = apply_guard(z, a, ai, e.guard, layout);
                if (joint.empty()) continue;
                joint = apply_guard(joint, net.automata[rai], rai, recv.guard, layout);
                if (!joint.empty()) {
                    steps.push_back({ai, ei, std::make_pair(rai, rei)});
                }
            }
        }
    }
    return steps;
}

std::string describe_step(const Network& net, const EdgeStep& step) {
    const auto& a = net.automata[step.automaton];
    const auto& e = a.edges[step.edge];
    std::ostringstream oss;
    oss << a.name << ": " << a.locations[e.source].id << " -> " << a.locations[e.target].id;
    if (e.sync) oss << " (" << e.sync->to_string();
    if (step.receive) {
        const auto& r = net.automata[step.receive->first];
        const auto& re = r.edges[step.receive->second];
        oss << " ~ " << r.name << ": " << r.locations[re.source].id << " -> "
            << r.locations[re.target].id << " " << re.sync->to_string();
    }
    if (e.sync) oss << ")";
    return oss.str();
}

} // namespace timechain::ta
