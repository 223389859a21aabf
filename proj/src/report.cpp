#include "timechain/report.hpp"

#include <sstream>

#include <json.hpp>

#include "timechain/errors.hpp"

namespace timechain::frontend {

using nlohmann::json;

bool Report::operator==(const Report& other) const {
    auto step_eq = [](const verify::TraceStep& a, const verify::TraceStep& b) {
        return a.description == b.description && a.zone_text == b.zone_text && a.step == b.step;
    };
    bool traces_equal = trace.has_value() == other.trace.has_value();
    if (traces_equal && trace) {
        traces_equal = trace->size() == other.trace->size();
        for (std::size_t i = 0; traces_equal && i < trace->size(); ++i) {
            traces_equal = step_eq((*trace)[i], (*other.trace)[i]);
        }
    }
    return verdict == other.verdict && bound_ticks == other.bound_ticks &&
           bound_ms == other.bound_ms && worst_case_ticks == other.worst_case_ticks &&
           worst_case_ms == other.worst_case_ms &&
           worst_case_unbounded == other.worst_case_unbounded &&
           states_explored == other.states_explored && wall_ms == other.wall_ms &&
           timelocks == other.timelocks && violation_reason == other.violation_reason &&
           warnings == other.warnings && traces_equal;
}

std::string verdict_name(verify::Verdict::Kind kind) {
    switch (kind) {
        case verify::Verdict::Kind::Satisfied: return "satisfied";
        case verify::Verdict::Kind::Violated: return "violated";
        case verify::Verdict::Kind::ResourceExhausted: return "resource_exhausted";
    }
    return "unknown";
}

std::string render_human(const Report& report) {
    std::ostringstream out;
    out << "verdict: " << report.verdict;
    if (!report.violation_reason.empty()) out << " (" << report.violation_reason << ")";
    out << "\n";
    out << "bound: " << report.bound_ms << " ms (" << report.bound_ticks << " ticks)\n";
    if (report.worst_case_unbounded) {
        out << "worst case: unbounded\n";
    } else if (report.worst_case_ticks) {
        out << "worst case: " << *report.worst_case_ms << " ms (" << *report.worst_case_ticks
            << " ticks)\n";
    }
    out << "states explored: " << report.states_explored << "\n";
    out << "wall time: " << report.wall_ms << " ms\n";
    if (report.timelocks > 0) out << "timelocked states: " << report.timelocks << "\n";
    for (const auto& w : report.warnings) out << "warning: " << w << "\n";
    if (report.trace) {
        out << "trace (" << report.trace->size() << " steps):\n";
        for (const auto& step : *report.trace) {
            out << "  - " << step.description << "\n";
            out << "    zone: " << step.zone_text << "\n";
        }
    }
    return out.str();
}

namespace {

json step_to_json(const verify::TraceStep& step) {
    json j;
    j["description"] = step.description;
    j["zone"] = step.zone_text;
    if (step.step) {
        json edge;
        edge["automaton"] = step.step->automaton;
        edge["edge"] = step.step->edge;
        if (step.step->receive) {
            edge["receive"] = {step.step->receive->first, step.step->receive->second};
        } else {
            edge["receive"] = nullptr;
        }
        j["step"] = edge;
    } else {
        j["step"] = nullptr;
    }
    return j;
}

verify::TraceStep step_from_json(const json& j) {
    verify::TraceStep step;
    step.description = j.at("description").get<std::string>();
    step.zone_text = j.at("zone").get<std::string>();
    if (!j.at("step").is_null()) {
        const json& edge = j.at("step");
        ta::EdgeStep es;
        es.automaton = edge.at("automaton").get<std::size_t>();
        es.edge = edge.at("edge").get<std::size_t>();
        if (!edge.at("receive").is_null()) {
            es.receive = std::make_pair(edge.at("receive")[0].get<std::size_t>(),
                                        edge.at("receive")[1].get<std::size_t>());
        }
        step.step = es;
    }
    return step;
}

} // namespace

std::string render_machine(const Report& report) {
    json j;
    j["verdict"] = report.verdict;
    j["bound_ticks"] = report.bound_ticks;
    j["bound_ms"] = report.bound_ms;
    if (report.worst_case_unbounded) {
        j["worst_case_ticks"] = "unbounded";
    } else if (report.worst_case_ticks) {
        j["worst_case_ticks"] = *report.worst_case_ticks;
        j["worst_case_ms"] = *report.worst_case_ms;
    }
    j["states_explored"] = report.states_explored;
    j["wall_ms"] = report.wall_ms;
    j["timelocks"] = report.timelocks;
    j["violation_reason"] = report.violation_reason;
    j["warnings"] = report.warnings;
    if (report.trace) {
        json steps = json::array();
        for (const auto& step : *report.trace) steps.push_back(step_to_json(step));
        j["trace"] = steps;
    }
    return j.dump(2) + "\n";
}

Report parse_report(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(1, 1, std::string("bad report document: ") + e.what());
    }
    Report report;
    report.verdict = j.at("verdict").get<std::string>();
    report.bound_ticks = j.at("bound_ticks").get<ta::Ticks>();
    report.bound_ms = j.at("bound_ms").get<std::string>();
    if (j.contains("worst_case_ticks")) {
        if (j["worst_case_ticks"].is_string()) {
            report.worst_case_unbounded = true;
        } else {
            report.worst_case_ticks = j["worst_case_ticks"].get<ta::Ticks>();
            report.worst_case_ms = j.at("worst_case_ms").get<std::string>();
        }
    }
    report.states_explored = j.at("states_explored").get<std::size_t>();
    report.wall_ms = j.at("wall_ms").get<double>();
    report.timelocks = j.at("timelocks").get<std::size_t>();
    report.violation_reason = j.at("violation_reason").get<std::string>();
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("trace")) {
        std::vector<verify::TraceStep> steps;
        for (const auto& s : j["trace"]) steps.push_back(step_from_json(s));
        report.trace = std::move(steps);
    }
    return report;
}

std::string render_trace(const std::vector<verify::TraceStep>& trace) {
    json steps = json::array();
    for (const auto& step : trace) steps.push_back(step_to_json(step));
    json j;
    j["trace"] = steps;
    return j.dump(2) + "\n";
}

} // namespace timechain::frontend
