// Acceptance suite: one check per criterion, one PASS/FAIL line each.
// Exits non-zero if any criterion fails its tolerances or runtime budget.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "oracle.hpp"
#include "timechain/boiler.hpp"
#include "timechain/cli.hpp"
#include "timechain/errors.hpp"
#include "timechain/jitter.hpp"
#include "timechain/model_file.hpp"
#include "timechain/patterns.hpp"
#include "timechain/verifier.hpp"
#include "timechain/zone.hpp"

using namespace timechain;
using verify::StateFormula;
using verify::Verdict;

namespace {

void ensure(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

verify::Query atom_query(const jitter::BuiltChain& built, ta::Ticks d) {
    return {StateFormula::atom(built.stimulus_atom.first, built.stimulus_atom.second),
            StateFormula::atom(built.response_atom.first, built.response_atom.second), d};
}

// --- criterion 1: jitter arithmetic -----------------------------------------

void criterion_jitter(std::ostream&) {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<ta::Ticks> v(0, 100000);
    for (int round = 0; round < 1000; ++round) {
        const ta::Ticks h = v(rng);
        jitter::JitterSpec spec;
        spec.hardware = {h, h};
        spec.software = {v(rng), 0};
        spec.software.max = spec.software.min + v(rng);
        spec.communication = {v(rng), 0};
        spec.communication.max = spec.communication.min + v(rng);

        const auto total = jitter::total_jitter(spec);
        ensure(total.min == spec.hardware.min + spec.software.min + spec.communication.min,
               "total jitter lower bound is not the component sum");
        ensure(total.max == spec.hardware.max + spec.software.max + spec.communication.max,
               "total jitter upper bound is not the component sum");

        jitter::JitterSpec varying = spec;
        varying.hardware = {h, h + 1 + v(rng)};
        bool rejected = false;
        try {
            jitter::total_jitter(varying);
        } catch (const InvalidBounds&) {
            rejected = true;
        }
        ensure(rejected, "non-constant hardware jitter was accepted");
    }
}

// --- criterion 2: pattern-bound exactness ------------------------------------

void criterion_pattern_bounds(std::ostream&) {
    for (ta::Ticks l = 0; l <= 20; ++l) {
        for (ta::Ticks u = l; u <= 20; ++u) {
            auto a = patterns::atomic_action({l, u}, std::nullopt, std::nullopt);
            const auto times = oracle::traversal_times(a, u + 2);
            ensure(!times.empty(), "no traversal observed");
            ensure(*times.begin() == l, "sojourn minimum differs from l_bound");
            ensure(*times.rbegin() == u, "sojourn maximum differs from u_bound");
        }
    }
}

// --- criteria 3 and 10: composition oracle equivalence + determinism ----------

struct ChainCorpusResult {
    std::size_t chains = 0;
    std::size_t checks = 0;
};

ChainCorpusResult run_chain_corpus(bool cross_check_orders, std::ostream& log) {
    std::mt19937_64 rng(303);
    ChainCorpusResult stats;
    for (int round = 0; round < 200; ++round) {
        const auto spec = oracle::random_chain(rng, 4, 10, true);
        const auto built = jitter::build_time_chain(spec.chain);
        ensure(built.warnings.empty(), "chain construction warned unexpectedly");

        const auto reference = oracle::discrete_check(
                built.network,
                StateFormula::atom(built.stimulus_atom.first, built.stimulus_atom.second),
                StateFormula::atom(built.response_atom.first, built.response_atom.second),
                spec.upper_sum + 3);
        ensure(reference.ever_armed, "stimulus never fired in the reference run");
        ensure(!reference.armed_stuck, "reference run deadlocked while armed");

        for (ta::Ticks d = 0; d <= spec.upper_sum + 2; ++d) {
            const auto verdict = verify::explore(built.network, atom_query(built, d));
            ensure(verdict.kind != Verdict::Kind::ResourceExhausted, "state cap hit");
            const bool engine_violated = verdict.kind == Verdict::Kind::Violated;
            if (engine_violated != reference.violated(d)) {
                std::ostringstream oss;
                oss << "verdict mismatch at d=" << d << " (engine "
                    << (engine_violated ? "Violated" : "Satisfied") << ", oracle max z "
                    << reference.max_armed_z << ") in round " << round;
                throw std::runtime_error(oss.str());
            }
            if (cross_check_orders) {
                verify::ExploreLimits dfs;
                dfs.order = verify::ExploreOrder::Dfs;
                verify::ExploreLimits rnd;
                rnd.order = verify::ExploreOrder::Random;
                rnd.seed = 1000003ull * round + d;
                const auto v_dfs = verify::explore(built.network, atom_query(built, d), dfs);
                const auto v_rnd = verify::explore(built.network, atom_query(built, d), rnd);
                ensure(v_dfs.kind == verdict.kind, "DFS verdict differs from BFS");
                ensure(v_rnd.kind == verdict.kind, "randomized verdict differs from BFS");
            }
            ++stats.checks;
        }

        // The boundary cases called out explicitly.
        ensure(verify::explore(built.network, atom_query(built, spec.upper_sum)).kind ==
                       Verdict::Kind::Satisfied,
               "d = sum of upper bounds must be Satisfied");
        if (spec.upper_sum > 0) {
            ensure(verify::explore(built.network, atom_query(built, spec.upper_sum - 1)).kind ==
                           Verdict::Kind::Violated,
                   "d = sum of upper bounds - 1 must be Violated");
        }
        ++stats.chains;
    }
    log << " [" << stats.chains << " chains, " << stats.checks << " bound checks]";
    return stats;
}

void criterion_composition(std::ostream& log) { run_chain_corpus(false, log); }
void criterion_determinism(std::ostream& log) { run_chain_corpus(true, log); }

// --- criterion 4: alternative composition ------------------------------------

void criterion_alternative(std::ostream&) {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<ta::Ticks> bound(0, 10);
    for (int round = 0; round < 40; ++round) {
        const ta::Ticks ua = bound(rng);
        const ta::Ticks la = std::uniform_int_distribution<ta::Ticks>(0, ua)(rng);
        const ta::Ticks ub = bound(rng);
        const ta::Ticks lb = std::uniform_int_distribution<ta::Ticks>(0, ub)(rng);
        auto branch_a = patterns::atomic_action({la, ua}, std::nullopt, std::nullopt, "a");
        auto branch_b = patterns::atomic_action({lb, ub}, std::nullopt, std::nullopt, "b");

        for (auto mode : {patterns::AltMergeMode::MergeBoth, patterns::AltMergeMode::MergePre,
                          patterns::AltMergeMode::MergePost}) {
            auto alt = patterns::alt_compose(branch_a, branch_b, mode);
            // Both-branch semantics applies when both branches start from the
            // merged Pre; MergePost keeps only the first branch reachable.
            const bool both = mode != patterns::AltMergeMode::MergePost;
            const ta::Ticks expect_max = both ? std::max(ua, ub) : ua;
            const ta::Ticks expect_min = both ? std::min(la, lb) : la;

            const auto times = oracle::traversal_times(alt, expect_max + 2);
            ensure(!times.empty(), "no traversal in alternative composition");
            ensure(*times.begin() == expect_min, "best case differs from min lower bound");
            ensure(*times.rbegin() == expect_max, "worst case differs from max upper bound");

            // Engine-side worst case for the same automaton.
            std::vector<StateFormula> act_atoms, post_atoms;
            for (const auto& loc : alt.locations) {
                if (loc.kind == ta::LocationKind::Internal && !loc.invariant.empty()) {
                    act_atoms.push_back(StateFormula::atom(alt.name, loc.id));
                }
                if (loc.kind == ta::LocationKind::Post) {
                    post_atoms.push_back(StateFormula::atom(alt.name, loc.id));
                }
            }
            auto net = patterns::par_compose({alt});
            auto wcrt = verify::worst_case_response(net, StateFormula::disjunction(act_atoms),
                                                    StateFormula::disjunction(post_atoms),
                                                    std::max(ua, ub) + 2);
            ensure(std::holds_alternative<ta::Ticks>(wcrt), "worst case came back unbounded");
            ensure(std::get<ta::Ticks>(wcrt) == expect_max,
                   "worst_case_response differs from the branch bound");
        }
    }
}

// --- criterion 5: timing wrapper ----------------------------------------------

void criterion_wrapper(std::ostream&) {
    auto body = patterns::atomic_action({1, 2}, std::nullopt, std::nullopt);
    auto jittered = patterns::wrap_periodic(body, {10, 0, 2});
    const auto seps = oracle::dispatch_separations(jittered, 3, 15);
    ensure(seps == std::set<ta::Ticks>{10, 11, 12},
           "activation separations differ from [10, 12]");

    auto exact = patterns::wrap_periodic(body, {10, 0, 0});
    ensure(oracle::dispatch_separations(exact, 3, 15) == std::set<ta::Ticks>{10},
           "zero jitter must give exactly the period");
}

// --- criterion 6: DBM oracle ---------------------------------------------------

void criterion_dbm(std::ostream& log) {
    std::mt19937_64 rng(606);
    constexpr std::int64_t kGrid = 32;
    std::size_t idempotent = 0, rounds = 0;

    auto random_raw = [&rng](std::size_t dim) {
        zone::Zone raw(dim);
        std::uniform_int_distribution<std::int64_t> value(-8, 8);
        std::uniform_int_distribution<std::size_t> clock(0, dim - 1);
        std::uniform_int_distribution<int> count(2, 6);
        const int n = count(rng);
        for (int k = 0; k < n; ++k) {
            const std::size_t i = clock(rng), j = clock(rng);
            if (i == j) continue;
            // Tighten only: clock valuations stay non-negative, as in any
            // reachable DBM, so the grid box sees every witness point.
            const auto b = zone::Bound::nonstrict(value(rng));
            if (b < raw.at(i, j)) raw.set(i, j, b);
        }
        return raw;
    };

    for (int round = 0; round < 10000; ++round) {
        const std::size_t dim = (round % 2 == 0) ? 3 : 2;
        zone::Zone raw = random_raw(dim);
        const auto reference = oracle::GridZone::from_zone(raw, kGrid);

        zone::Zone canon = raw.canonicalized();
        ensure(canon.empty() == reference.empty(), "emptiness mismatch");
        ensure(canon == canon.canonicalized(), "canonicalize is not idempotent");
        ++idempotent;
        ensure(oracle::GridZone::from_zone(canon, kGrid) == reference,
               "canonicalization changed the point set");
        ++rounds;
        if (canon.empty()) continue;

        ensure(oracle::GridZone::from_zone(canon.up(), kGrid) == reference.up(),
               "up() mismatch against the valuation oracle");

        std::uniform_int_distribution<std::int64_t> value(-8, 8);
        std::uniform_int_distribution<std::size_t> clock(0, dim - 1);
        const std::size_t ci = clock(rng), cj = clock(rng);
        if (ci != cj) {
            const auto b = zone::Bound::nonstrict(value(rng));
            ensure(oracle::GridZone::from_zone(canon.constrain(ci, cj, b), kGrid) ==
                           reference.constrain(ci, cj, b),
                   "constrain() mismatch against the valuation oracle");
        }

        std::vector<std::size_t> resets;
        for (std::size_t c = 1; c < dim; ++c) {
            if (rng() % 2 == 0) resets.push_back(c);
        }
        ensure(oracle::GridZone::from_zone(canon.reset(resets), kGrid) ==
                       reference.reset(resets),
               "reset() mismatch against the valuation oracle");

        zone::Zone other = random_raw(dim).canonicalized();
        const auto other_ref = oracle::GridZone::from_zone(other, kGrid);
        ensure(canon.includes(other) == reference.includes(other_ref),
               "includes() mismatch against the valuation oracle");
    }
    ensure(idempotent == 10000, "idempotence not checked on every zone");
    log << " [" << rounds << " zones]";
}

// --- criterion 7: channel matching ---------------------------------------------

void criterion_channels(std::ostream&) {
    std::mt19937_64 rng(707);
    for (int round = 0; round < 100; ++round) {
        const int n = 2 + static_cast<int>(rng() % 3);
        std::vector<ta::TimedAutomaton> members;
        for (int i = 0; i < n; ++i) {
            const std::string in = "h" + std::to_string(i);
            const std::string out = "h" + std::to_string(i + 1);
            members.push_back(patterns::atomic_action(
                    {0, 2}, i == 0 ? std::optional<std::string>{} : std::optional<std::string>{in},
                    out, "m" + std::to_string(i)));
        }
        // Close the chain so every channel is matched.
        ta::TimedAutomaton sink;
        sink.name = "sink";
        sink.locations.push_back({"W", ta::LocationKind::Internal, {}});
        ta::Edge consume;
        consume.source = 0;
        consume.target = 0;
        consume.sync = ta::Sync{"h" + std::to_string(n), ta::SyncDirection::Receive};
        sink.edges.push_back(consume);
        members.push_back(sink);

        bool accepted = true;
        try {
            patterns::par_compose(members);
        } catch (const ChannelMismatch&) {
            accepted = false;
        }
        ensure(accepted, "a fully matched network was rejected");

        // Break it: drop the sink (unmatched emit) or flip one receive.
        auto broken = members;
        if (rng() % 2 == 0) {
            broken.pop_back();
        } else {
            const std::size_t victim = 1 + rng() % (n - 1);
            for (auto& e : broken[victim].edges) {
                if (e.sync && e.sync->direction == ta::SyncDirection::Receive) {
                    e.sync->direction = ta::SyncDirection::Emit;
                }
            }
        }
        bool rejected = false;
        try {
            patterns::par_compose(broken);
        } catch (const ChannelMismatch&) {
            rejected = true;
        }
        ensure(rejected, "an unmatched network was accepted");
    }
}

// --- criterion 8: boiler simulation ----------------------------------------------

void criterion_boiler(std::ostream&) {
    boiler::BoilerConfig cfg;
    cfg.w0 = 50;
    cfg.pump_rates = {10, 0};
    cfg.pump_start_delays = {0, 0};
    cfg.vaporization_rate = 4;
    cfg.w_min = 0;
    cfg.w_max = 100;

    {
        auto traj = boiler::simulate(cfg, {{0, 1, boiler::PumpCommand::On}}, 1.0, 0.5);
        const double w1 = traj.samples.back().w;
        ensure(std::abs(w1 - 56) <= 1e-9 * 56, "w(1) != 56 for the undelayed pump");
    }
    {
        auto delayed = cfg;
        delayed.pump_start_delays = {0.5, 0};
        auto traj = boiler::simulate(delayed, {{0, 1, boiler::PumpCommand::On}}, 1.0, 0.5);
        const double w_half = traj.samples[1].w;
        const double w1 = traj.samples.back().w;
        ensure(std::abs(w_half - 48) <= 1e-9 * 48, "w(0.5) != 48 with T1 = 0.5");
        ensure(std::abs(w1 - 51) <= 1e-9 * 51, "w(1) != 51 with T1 = 0.5");
    }

    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> level(41.0, 99.0);
    std::uniform_int_distribution<int> rate(1, 20);
    const ta::Ticks tpm = 60000;
    const double minutes_per_tick = 1.0 / static_cast<double>(tpm);
    for (int round = 0; round < 100; ++round) {
        boiler::BoilerConfig c;
        c.w0 = level(rng);
        c.pump_rates = {static_cast<double>(rate(rng)), static_cast<double>(rate(rng))};
        c.pump_start_delays = {0, 0};
        c.vaporization_rate = rate(rng);
        c.w_min = 40;
        c.w_max = 100;
        const auto bound = boiler::required_response_bound(c, c.w0, tpm);
        ensure(bound.has_value(), "bound unexpectedly unbounded");

        const double fill = c.pump_rates[0] + c.pump_rates[1] - c.vaporization_rate;
        const double low_slack = (c.w0 - c.w_min) / c.vaporization_rate;
        const bool low_binding = fill <= 0 || low_slack <= (c.w_max - c.w0) / fill;

        // Simulate-until-crossing on the binding side: delaying by the bound
        // stays inside, one extra tick crosses.
        auto level_after = [&](ta::Ticks ticks, bool pumps_on) {
            boiler::PumpCommandSchedule sched;
            if (pumps_on) {
                sched.push_back({0, 1, boiler::PumpCommand::On});
                sched.push_back({0, 2, boiler::PumpCommand::On});
            }
            const double horizon = static_cast<double>(ticks) * minutes_per_tick;
            auto traj = boiler::simulate(c, sched, horizon, horizon);
            return traj.samples.back().w;
        };
        if (low_binding) {
            if (*bound > 0) {
                ensure(level_after(*bound, false) >= c.w_min - 1e-9,
                       "delaying by the bound already crossed w_min");
            }
            ensure(level_after(*bound + 1, false) < c.w_min + 1e-9,
                   "one tick past the bound did not cross w_min");
        } else {
            if (*bound > 0) {
                ensure(level_after(*bound, true) <= c.w_max + 1e-9,
                       "delaying by the bound already crossed w_max");
            }
            ensure(level_after(*bound + 1, true) > c.w_max - 1e-9,
                   "one tick past the bound did not cross w_max");
        }
    }
}

// --- criterion 9: end-to-end steam-boiler workflow --------------------------------

void criterion_workflow(std::ostream& log) {
    const std::string path = std::string(TIMECHAIN_SOURCE_DIR) + "/models/boiler_chain.yaml";
    auto model = frontend::parse_model_file(path);
    ensure(model.boiler_config.has_value(), "shipped model lacks the boiler section");
    ensure(model.chain.components.size() == 3, "shipped model is not a 3-component chain");

    const auto budget = boiler::required_response_bound(*model.boiler_config,
                                                        model.boiler_config->w0,
                                                        model.resolution.ticks_per_minute());
    ensure(budget.has_value(), "response budget unexpectedly unbounded");
    ensure(model.query.bound_d == *budget,
           "shipped bound is not the derived response budget");

    auto built = jitter::build_time_chain(model.chain);
    const auto verdict = verify::explore(built.network, model.query);
    ensure(verdict.kind == Verdict::Kind::Satisfied, "shipped scenario is not Satisfied");

    std::ostringstream out, err;
    const int code = frontend::cli_main({"check", path, "--quiet"}, out, err);
    ensure(code == 0, "cli check on the shipped model did not exit 0");

    // Inflate each component's communication jitter past the budget in turn.
    for (std::size_t victim = 0; victim < model.chain.components.size(); ++victim) {
        auto inflated = model.chain;
        inflated.components[victim].spec.communication.max = model.query.bound_d + 10;
        auto bad = jitter::build_time_chain(inflated);
        verify::Query q = model.query;
        const auto flipped = verify::explore(bad.network, q);
        ensure(flipped.kind == Verdict::Kind::Violated,
               "inflated jitter did not flip the verdict");
        ensure(oracle::trace_replays(bad.network, q, flipped),
               "violation trace does not replay");
    }
    log << " [budget " << *budget << " ticks]";
}

// --- driver -------------------------------------------------------------------

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(std::ostream&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
            {1, "jitter arithmetic matches the interval sum", 1.0, criterion_jitter},
            {2, "atomic sojourns exactly bracket the bounds", 10.0, criterion_pattern_bounds},
            {3, "explore matches the discrete-time oracle on random chains", 300.0,
             criterion_composition},
            {4, "alternative composition bounds per merge mode", 60.0, criterion_alternative},
            {5, "timing wrapper activation separations", 30.0, criterion_wrapper},
            {6, "DBM operations match the valuation-set oracle", 60.0, criterion_dbm},
            {7, "channel matching accepts/rejects correctly", 30.0, criterion_channels},
            {8, "boiler worked examples and response bounds", 30.0, criterion_boiler},
            {9, "end-to-end steam-boiler workflow", 10.0, criterion_workflow},
            {10, "verdicts independent of exploration order", 600.0, criterion_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream note;
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.run(note);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool ok = error.empty();
        if (ok && elapsed > c.budget_seconds) {
            error = "exceeded runtime budget";
            ok = false;
        }
        if (!ok) ++failures;
        std::cout << "CRITERION " << c.id << " [" << (ok ? "PASS" : "FAIL") << "] " << c.name
                  << note.str() << " (" << elapsed << " s";
        if (!ok) std::cout << "; " << error;
        std::cout << ")" << std::endl;
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
