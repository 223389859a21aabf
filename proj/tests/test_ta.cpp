#include <doctest.h>

#include "timechain/errors.hpp"
#include "timechain/patterns.hpp"
#include "timechain/ta.hpp"

using namespace timechain;
using zone::Bound;
using zone::Zone;

namespace {

ta::TimedAutomaton sender(ta::Ticks guard_at) {
    ta::TimedAutomaton a;
    a.name = "sender";
    const std::size_t x = a.add_clock("x");
    a.locations.push_back({"S0", ta::LocationKind::Internal, {}});
    a.locations.push_back({"S1", ta::LocationKind::Internal, {}});
    ta::Edge e;
    e.source = 0;
    e.target = 1;
    e.guard = {ta::ClockConstraint::lower(x, guard_at)};
    e.sync = ta::Sync{"go", ta::SyncDirection::Emit};
    a.edges.push_back(e);
    return a;
}

ta::TimedAutomaton receiver() {
    ta::TimedAutomaton a;
    a.name = "receiver";
    a.locations.push_back({"R0", ta::LocationKind::Internal, {}});
    a.locations.push_back({"R1", ta::LocationKind::Internal, {}});
    ta::Edge e;
    e.source = 0;
    e.target = 1;
    e.sync = ta::Sync{"go", ta::SyncDirection::Receive};
    a.edges.push_back(e);
    return a;
}

} // namespace

TEST_CASE("namespace_automaton prefixes names and preserves structure") {
    auto a = patterns::atomic_action({2, 5}, "in", "out");
    auto n = ta::namespace_automaton(a, "c1");
    CHECK(n.clocks[1] == "c1.x");
    CHECK(n.edges.size() == a.edges.size());
    CHECK(n.locations.size() == a.locations.size());
    CHECK(n.locations[0].id == "c1.Pre");
    CHECK(n.edges[0].sync->channel == "c1.in");

    auto p = ta::namespace_automaton(a, "p");
    for (std::size_t i = 1; i < n.clocks.size(); ++i) {
        for (std::size_t j = 1; j < p.clocks.size(); ++j) CHECK(n.clocks[i] != p.clocks[j]);
    }
}

TEST_CASE("namespaced automata compose without clock collisions") {
    auto a = patterns::atomic_action({2, 5}, std::nullopt, std::nullopt, "a");
    auto b = patterns::atomic_action({1, 3}, std::nullopt, std::nullopt, "a");
    auto net = patterns::par_compose({ta::namespace_automaton(a, "s1"),
                                      ta::namespace_automaton(b, "s2")});
    CHECK_NOTHROW(net.validate());
    CHECK(net.automata[0].clocks[1] != net.automata[1].clocks[1]);
}

TEST_CASE("enabled_edges honors guards against the zone") {
    ta::Network net;
    net.automata = {sender(2), receiver()};
    net.channels = {"go"};
    ta::NetworkLayout layout(net);
    REQUIRE(layout.dim == 2);

    Zone small = Zone(2).constrain(1, 0, Bound::nonstrict(1)); // x in [0,1]
    CHECK(ta::enabled_edges(net, {0, 0}, small, layout).empty());

    Zone large = Zone(2).constrain(1, 0, Bound::nonstrict(5)); // x in [0,5]
    auto steps = ta::enabled_edges(net, {0, 0}, large, layout);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].is_sync());
    CHECK(steps[0].automaton == 0);
    CHECK(steps[0].receive->first == 1);
}

TEST_CASE("enabled_edges lists unguarded internal edges") {
    ta::TimedAutomaton a;
    a.name = "lone";
    a.locations.push_back({"A", ta::LocationKind::Internal, {}});
    a.locations.push_back({"B", ta::LocationKind::Internal, {}});
    ta::Edge e;
    e.source = 0;
    e.target = 1;
    a.edges.push_back(e);

    ta::Network net;
    net.automata = {a};
    ta::NetworkLayout layout(net);
    auto steps = ta::enabled_edges(net, {0}, Zone(1), layout);
    REQUIRE(steps.size() == 1);
    CHECK(!steps[0].is_sync());
}

TEST_CASE("an emit without any receive partner is malformed") {
    ta::Network net;
    net.automata = {sender(0)};
    net.channels = {"go"};
    ta::NetworkLayout layout(net);
    CHECK_THROWS_AS(ta::enabled_edges(net, {0}, Zone(2), layout), MalformedNetwork);
}

TEST_CASE("synchronized steps pair emit and receive from distinct automata") {
    ta::Network net;
    net.automata = {sender(0), receiver(), receiver()};
    net.automata[2].name = "receiver2";
    net.channels = {"go"};
    ta::NetworkLayout layout(net);
    auto steps = ta::enabled_edges(net, {0, 0, 0}, Zone(2), layout);
    REQUIRE(steps.size() == 2); // one per ready receiver
    for (const auto& s : steps) {
        CHECK(s.is_sync());
        CHECK(s.automaton != s.receive->first);
    }
}

TEST_CASE("network layout maps member clocks to dense global indices") {
    auto a = patterns::atomic_action({1, 2}, std::nullopt, std::nullopt, "a");
    auto b = patterns::atomic_action({1, 2}, std::nullopt, std::nullopt, "b");
    auto net = patterns::par_compose({a, b});
    ta::NetworkLayout layout(net, 1);
    CHECK(layout.dim == 4); // reference + two clocks + one extra
    CHECK(layout.global(0, 1) == 1);
    CHECK(layout.global(1, 1) == 2);
    CHECK(layout.global(1, 0) == 0);
}

TEST_CASE("automaton validation catches broken references") {
    ta::TimedAutomaton a;
    a.name = "broken";
    a.locations.push_back({"only", ta::LocationKind::Internal, {}});
    ta::Edge e;
    e.source = 0;
    e.target = 7;
    a.edges.push_back(e);
    CHECK_THROWS_AS(a.validate(), MalformedNetwork);

    ta::TimedAutomaton dup;
    dup.name = "dup";
    dup.locations.push_back({"L", ta::LocationKind::Internal, {}});
    dup.locations.push_back({"L", ta::LocationKind::Internal, {}});
    CHECK_THROWS_AS(dup.validate(), MalformedNetwork);
}
