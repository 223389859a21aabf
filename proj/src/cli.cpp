#include "timechain/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "timechain/errors.hpp"
#include "timechain/model_file.hpp"
#include "timechain/report.hpp"
#include "timechain/uppaal_export.hpp"

namespace timechain::frontend {

namespace {

struct CommonOptions {
    std::string trace_path;
    std::size_t max_states = 1'000'000;
    bool quiet = false;
    std::string format = "human";
    std::string order = "bfs";
    std::uint64_t seed = 1;
};

verify::ExploreLimits make_limits(const CommonOptions& opts) {
    verify::ExploreLimits limits;
    limits.max_states = opts.max_states;
    limits.seed = opts.seed;
    if (opts.order == "bfs") limits.order = verify::ExploreOrder::Bfs;
    else if (opts.order == "dfs") limits.order = verify::ExploreOrder::Dfs;
    else if (opts.order == "random") limits.order = verify::ExploreOrder::Random;
    else throw Error("unknown exploration order '" + opts.order + "'");
    return limits;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--trace", opts.trace_path, "write a structured trace document here");
    cmd->add_option("--max-states", opts.max_states, "exploration state cap");
    cmd->add_flag("--quiet", opts.quiet, "suppress output; rely on the exit code");
    cmd->add_option("--format", opts.format, "output format")
            ->check(CLI::IsMember({"human", "machine"}));
    cmd->add_option("--order", opts.order, "exploration order")
            ->check(CLI::IsMember({"bfs", "dfs", "random"}));
    cmd->add_option("--seed", opts.seed, "seed for randomized exploration");
}

void emit_report(const Report& report, const CommonOptions& opts, std::ostream& out) {
    if (opts.quiet) return;
    out << (opts.format == "machine" ? render_machine(report) : render_human(report));
}

void write_trace_file(const std::string& path, const std::vector<verify::TraceStep>& trace) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write trace file '" + path + "'");
    f << render_trace(trace);
}

ta::Ticks default_wcrt_cap(const ParsedModel& model) {
    ta::Ticks cap = 16;
    for (const auto& comp : model.chain.components) {
        cap += jitter::total_jitter(comp.spec).max;
        if (const auto* p = std::get_if<jitter::PeriodicActivation>(&comp.activation)) {
            cap += p->period.period + p->period.jit_ub;
        }
    }
    return cap;
}

int run_check(const std::string& model_path, const std::string& bound_ms,
              const CommonOptions& opts, std::ostream& out) {
    ParsedModel model = parse_model_file(model_path);
    jitter::BuiltChain built = jitter::build_time_chain(model.chain);

    verify::Query query = model.query;
    if (!bound_ms.empty()) {
        query.bound_d = ms_to_ticks(bound_ms, model.resolution.ticks_per_ms);
    }

    const auto start = std::chrono::steady_clock::now();
    verify::Verdict verdict = verify::explore(built.network, query, make_limits(opts));
    const auto stop = std::chrono::steady_clock::now();

    Report report;
    report.verdict = verdict_name(verdict.kind);
    report.bound_ticks = query.bound_d;
    report.bound_ms = ticks_to_ms_text(query.bound_d, model.resolution.ticks_per_ms);
    report.states_explored = verdict.states_explored;
    report.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    report.timelocks = verdict.timelocks;
    report.violation_reason = verdict.violation_reason;
    report.warnings = built.warnings;
    report.warnings.insert(report.warnings.end(), verdict.warnings.begin(),
                           verdict.warnings.end());
    if (verdict.kind == verify::Verdict::Kind::Violated) report.trace = verdict.trace;

    if (!opts.trace_path.empty() && report.trace) write_trace_file(opts.trace_path, *report.trace);
    emit_report(report, opts, out);

    switch (verdict.kind) {
        case verify::Verdict::Kind::Satisfied: return 0;
        case verify::Verdict::Kind::Violated: return 1;
        case verify::Verdict::Kind::ResourceExhausted: return 2;
    }
    return 2;
}

int run_wcrt(const std::string& model_path, const std::string& cap_ms, const CommonOptions& opts,
             std::ostream& out) {
    ParsedModel model = parse_model_file(model_path);
    jitter::BuiltChain built = jitter::build_time_chain(model.chain);

    ta::Ticks cap = cap_ms.empty() ? default_wcrt_cap(model)
                                   : ms_to_ticks(cap_ms, model.resolution.ticks_per_ms);

    const auto start = std::chrono::steady_clock::now();
    verify::ResponseBound result = verify::worst_case_response(
            built.network, model.query.stimulus, model.query.response, cap, make_limits(opts));
    const auto stop = std::chrono::steady_clock::now();

    Report report;
    report.bound_ticks = model.query.bound_d;
    report.bound_ms = ticks_to_ms_text(model.query.bound_d, model.resolution.ticks_per_ms);
    report.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    report.warnings = built.warnings;
    if (const auto* ticks = std::get_if<ta::Ticks>(&result)) {
        report.verdict = "satisfied";
        report.worst_case_ticks = *ticks;
        report.worst_case_ms = ticks_to_ms_text(*ticks, model.resolution.ticks_per_ms);
    } else {
        report.verdict = "violated";
        report.worst_case_unbounded = true;
    }
    emit_report(report, opts, out);
    return report.worst_case_unbounded ? 1 : 0;
}

int run_simulate(const std::string& model_path, double horizon, double dt, double margin,
                 const std::string& out_path, const CommonOptions& opts, std::ostream& out) {
    ParsedModel model = parse_model_file(model_path);
    if (!model.boiler_config) {
        throw Error("model '" + model_path + "' has no boiler section to simulate");
    }
    const auto& cfg = *model.boiler_config;
    boiler::Trajectory traj = boiler::simulate(cfg, model.schedule, horizon, dt);
    const auto points = boiler::find_critical_points(traj, cfg, margin);
    const auto budget =
            boiler::required_response_bound(cfg, cfg.w0, model.resolution.ticks_per_minute());

    auto kind_name = [](boiler::CriticalKind k) {
        switch (k) {
            case boiler::CriticalKind::NearLowLimit: return "near_low_limit";
            case boiler::CriticalKind::NearHighLimit: return "near_high_limit";
            case boiler::CriticalKind::ModeSwitch: return "mode_switch";
        }
        return "unknown";
    };

    if (opts.format == "machine") {
        nlohmann::json j;
        j["dt"] = traj.dt;
        auto samples = nlohmann::json::array();
        for (const auto& s : traj.samples) {
            samples.push_back({{"t", s.t}, {"w", s.w}, {"u1", s.u1}, {"u2", s.u2},
                               {"mode", s.mode}});
        }
        j["samples"] = samples;
        auto crit = nlohmann::json::array();
        for (const auto& p : points) {
            crit.push_back({{"t", p.time}, {"kind", kind_name(p.kind)}, {"margin", p.margin}});
        }
        j["critical_points"] = crit;
        if (budget) {
            j["response_budget_ticks"] = *budget;
            j["response_budget_ms"] =
                    ticks_to_ms_text(*budget, model.resolution.ticks_per_ms);
        } else {
            j["response_budget_ticks"] = "unbounded";
        }
        if (!opts.quiet) out << j.dump(2) << "\n";
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            if (!f) throw Error("cannot write trajectory file '" + out_path + "'");
            f << boiler::to_delimited(traj);
        }
        return 0;
    }

    const std::string table = boiler::to_delimited(traj);
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write trajectory file '" + out_path + "'");
        f << table;
    } else if (!opts.quiet) {
        out << table;
    }
    if (!opts.quiet) {
        for (const auto& p : points) {
            out << "# critical: t=" << p.time << " " << kind_name(p.kind)
                << " margin=" << p.margin << "\n";
        }
        if (budget) {
            out << "# response budget at w0: "
                << ticks_to_ms_text(*budget, model.resolution.ticks_per_ms) << " ms ("
                << *budget << " ticks)\n";
        } else {
            out << "# response budget at w0: unbounded\n";
        }
    }
    return 0;
}

int run_export(const std::string& model_path, const std::string& out_path,
               const CommonOptions& opts, std::ostream& out) {
    ParsedModel model = parse_model_file(model_path);
    jitter::BuiltChain built = jitter::build_time_chain(model.chain);
    UppaalExport exported = export_uppaal(built.network, model.query);
    validate_uppaal_export(exported.model_xml);

    std::ofstream xml(out_path);
    if (!xml) throw Error("cannot write '" + out_path + "'");
    xml << exported.model_xml;

    std::string query_path = out_path;
    const auto dot = query_path.rfind('.');
    if (dot != std::string::npos && query_path.find('/', dot) == std::string::npos) {
        query_path = query_path.substr(0, dot);
    }
    query_path += ".q";
    std::ofstream q(query_path);
    if (!q) throw Error("cannot write '" + query_path + "'");
    q << exported.queries;

    if (!opts.quiet) {
        out << "wrote " << out_path << "\n";
        out << "wrote " << query_path << "\n";
    }
    return 0;
}

int run_validate(const std::string& model_path, const CommonOptions& opts, std::ostream& out) {
    ParsedModel model = parse_model_file(model_path);
    std::vector<std::string> problems;

    jitter::BuiltChain built = jitter::build_time_chain(model.chain);
    auto violations = patterns::check_channel_matching(built.network.automata);
    for (const auto& v : violations) problems.push_back(v.to_string());

    for (const auto& comp : model.chain.components) {
        const auto jt = jitter::total_jitter(comp.spec);
        auto body = patterns::atomic_action({jt.min, jt.max}, std::nullopt, std::nullopt,
                                            comp.name);
        auto wf = patterns::is_well_formed(body);
        for (const auto& d : wf.diagnostics) problems.push_back(comp.name + ": " + d);
    }

    try {
        verify::ExploreContext ctx(built.network, model.query);
    } catch (const Error& e) {
        problems.push_back(std::string("query: ") + e.what());
    }

    if (!opts.quiet) {
        if (problems.empty()) {
            out << "ok: " << model.chain.components.size() << " components, "
                << built.network.automata.size() << " automata, "
                << built.network.channels.size() << " channels\n";
            for (const auto& w : built.warnings) out << "warning: " << w << "\n";
        } else {
            for (const auto& p : problems) out << "problem: " << p << "\n";
        }
    }
    return problems.empty() ? 0 : 2;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Response-time verification for jitter-annotated component chains"};
    app.name("timechain");
    app.require_subcommand(1);

    CommonOptions opts;
    std::string model_path, bound_ms, cap_ms, out_path;
    double horizon = 0, dt = 0, margin = 1.0;

    auto* check = app.add_subcommand("check", "verify the bounded response-time query");
    check->add_option("model", model_path, "model file")->required();
    check->add_option("--bound", bound_ms, "override the query bound (ms)");
    add_common(check, opts);

    auto* wcrt = app.add_subcommand("wcrt", "binary-search the worst-case response time");
    wcrt->add_option("model", model_path, "model file")->required();
    wcrt->add_option("--cap", cap_ms, "search cap (ms)");
    add_common(wcrt, opts);

    auto* simulate = app.add_subcommand("simulate", "run the boiler process simulator");
    simulate->add_option("model", model_path, "model file")->required();
    simulate->add_option("--horizon", horizon, "simulation horizon (min)")->required();
    simulate->add_option("--dt", dt, "sampling step (min)")->required();
    simulate->add_option("--margin", margin, "critical-point margin threshold (liters)");
    simulate->add_option("-o,--output", out_path, "write the trajectory here");
    add_common(simulate, opts);

    auto* export_cmd = app.add_subcommand("export", "export the network for UPPAAL");
    export_cmd->add_option("model", model_path, "model file")->required();
    export_cmd->add_option("-o,--output", out_path, "output model path (.xml)")->required();
    add_common(export_cmd, opts);

    auto* validate = app.add_subcommand("validate", "parse and check the model only");
    validate->add_option("model", model_path, "model file")->required();
    add_common(validate, opts);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*check) return run_check(model_path, bound_ms, opts, out);
        if (*wcrt) return run_wcrt(model_path, cap_ms, opts, out);
        if (*simulate) return run_simulate(model_path, horizon, dt, margin, out_path, opts, out);
        if (*export_cmd) return run_export(model_path, out_path, opts, out);
        if (*validate) return run_validate(model_path, opts, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace timechain::frontend
