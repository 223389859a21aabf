#pragma once

#include <optional>
#include <string>
#include <vector>

#include "timechain/ta.hpp"
#include "timechain/verifier.hpp"

namespace timechain::frontend {

/// Outcome of one check/wcrt run; the human and machine renderings carry the
/// same fields.
struct Report {
    std::string verdict; // "satisfied" | "violated" | "resource_exhausted"
    ta::Ticks bound_ticks = 0;
    std::string bound_ms;
    std::optional<ta::Ticks> worst_case_ticks;
    std::optional<std::string> worst_case_ms;
    bool worst_case_unbounded = false;
    std::size_t states_explored = 0;
    double wall_ms = 0;
    std::size_t timelocks = 0;
    std::string violation_reason;
    std::vector<std::string> warnings;
    std::optional<std::vector<verify::TraceStep>> trace;

    bool operator==(const Report& other) const;
};

std::string verdict_name(verify::Verdict::Kind kind);

std::string render_human(const Report& report);
/// Single JSON document; parse_report inverts it losslessly.
std::string render_machine(const Report& report);
Report parse_report(const std::string& json_text);

/// Structured trace document written by --trace.
std::string render_trace(const std::vector<verify::TraceStep>& trace);

} // namespace timechain::frontend
