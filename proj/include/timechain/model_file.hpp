#pragma once

#include <optional>
#include <string>

#include "timechain/boiler.hpp"
#include "timechain/jitter.hpp"
#include "timechain/verifier.hpp"

namespace timechain::frontend {

/// User-facing time unit is the millisecond; ticks are internal only.
struct Resolution {
    ta::Ticks ticks_per_ms = 1;

    ta::Ticks ticks_per_minute() const { return ticks_per_ms * 60000; }
};

struct ParsedModel {
    Resolution resolution;
    jitter::TimeChain chain;
    verify::Query query; // bound converted to ticks
    std::optional<boiler::BoilerConfig> boiler_config;
    boiler::PumpCommandSchedule schedule;
};

/// Strict parse of the YAML model document (schema "timechain/1"): unknown
/// keys are rejected, every millisecond quantity must convert exactly to
/// ticks at the declared resolution. Throws ParseError / ResolutionError.
ParsedModel parse_model(const std::string& text);
ParsedModel parse_model_file(const std::string& path);

/// Canonical rendering; parse_model(render_model(m)) reproduces m.
std::string render_model(const ParsedModel& model);

/// Exact decimal-to-tick conversion of a millisecond literal such as "0.25".
/// Throws ResolutionError when the value is not representable.
ta::Ticks ms_to_ticks(const std::string& text, ta::Ticks ticks_per_ms);

/// Exact tick-to-decimal-millisecond text; inverse of ms_to_ticks.
std::string ticks_to_ms_text(ta::Ticks ticks, ta::Ticks ticks_per_ms);

} // namespace timechain::frontend
