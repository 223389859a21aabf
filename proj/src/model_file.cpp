#include "timechain/model_file.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "timechain/errors.hpp"

namespace timechain::frontend {

namespace {

constexpr const char* kSchema = "timechain/1";

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
    throw ParseError(node.Mark().line + 1, node.Mark().column + 1, message);
}

void require(const YAML::Node& node, bool condition, const std::string& message) {
    if (!condition) fail(node, message);
}

YAML::Node get(const YAML::Node& map, const std::string& key) {
    YAML::Node v = map[key];
    if (!v.IsDefined()) fail(map, "missing key '" + key + "'");
    return v;
}

void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (const auto& entry : map) {
        const std::string key = entry.first.Scalar();
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) { known = true; break; }
        }
        if (!known) fail(entry.first, "unknown key '" + key + "' in " + context);
    }
}

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

ta::Ticks scalar_ms_to_ticks(const YAML::Node& node, ta::Ticks tpm) {
    require(node, node.IsScalar(), "expected a millisecond value");
    try {
        return ms_to_ticks(node.Scalar(), tpm);
    } catch (const ResolutionError&) {
        throw;
    } catch (const Error& e) {
        fail(node, e.what());
    }
}

jitter::JitterInterval interval_ms(const YAML::Node& node, ta::Ticks tpm) {
    if (node.IsScalar()) {
        const ta::Ticks v = scalar_ms_to_ticks(node, tpm);
        return {v, v};
    }
    require(node, node.IsSequence() && node.size() == 2,
            "expected a millisecond value or [min, max] pair");
    return {scalar_ms_to_ticks(node[0], tpm), scalar_ms_to_ticks(node[1], tpm)};
}

double scalar_double(const YAML::Node& node, const std::string& what) {
    require(node, node.IsScalar(), "expected a number for " + what);
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        fail(node, "not a number: '" + node.Scalar() + "'");
    }
}

jitter::JitterSpec parse_jitter(const YAML::Node& node, ta::Ticks tpm) {
    require(node, node.IsMap(), "jitter must be a map");
    check_keys(node, {"hardware_ms", "software_ms", "communication_ms"}, "jitter");
    jitter::JitterSpec spec;
    spec.hardware = interval_ms(get(node, "hardware_ms"), tpm);
    spec.software = interval_ms(get(node, "software_ms"), tpm);
    spec.communication = interval_ms(get(node, "communication_ms"), tpm);
    if (spec.hardware.min != spec.hardware.max) {
        fail(node, "hardware jitter is constant; give a single value");
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        fail(node, e.what());
    }
    return spec;
}

jitter::ChainComponent parse_component(const YAML::Node& node, ta::Ticks tpm) {
    require(node, node.IsMap(), "component must be a map");
    check_keys(node,
               {"name", "activation", "in", "out", "period_ms", "period_jitter_ms", "jitter"},
               "component");
    jitter::ChainComponent comp;
    comp.name = get(node, "name").Scalar();
    if (!valid_identifier(comp.name)) fail(get(node, "name"), "component name must be an identifier");
    if (comp.name == "env_sink" || comp.name == "env_source") {
        fail(get(node, "name"), "component name '" + comp.name + "' is reserved");
    }
    comp.spec = parse_jitter(get(node, "jitter"), tpm);

    const std::string activation = get(node, "activation").Scalar();
    const YAML::Node out = get(node, "out");
    if (!valid_identifier(out.Scalar())) fail(out, "channel name must be an identifier");
    if (activation == "event") {
        require(node, !node["period_ms"] && !node["period_jitter_ms"],
                "event components take no period");
        const YAML::Node in = get(node, "in");
        if (!valid_identifier(in.Scalar())) fail(in, "channel name must be an identifier");
        comp.activation = jitter::EventActivation{in.Scalar(), out.Scalar()};
    } else if (activation == "periodic") {
        require(node, !node["in"], "periodic components take no input channel");
        patterns::PeriodSpec period;
        period.period = scalar_ms_to_ticks(get(node, "period_ms"), tpm);
        if (node["period_jitter_ms"]) {
            const YAML::Node j = node["period_jitter_ms"];
            require(j, j.IsSequence() && j.size() == 2, "period_jitter_ms must be [lb, ub]");
            period.jit_lb = scalar_ms_to_ticks(j[0], tpm);
            period.jit_ub = scalar_ms_to_ticks(j[1], tpm);
        }
        try {
            period.validate();
        } catch (const Error& e) {
            fail(node, e.what());
        }
        comp.activation = jitter::PeriodicActivation{period, out.Scalar()};
    } else {
        fail(get(node, "activation"), "activation must be 'event' or 'periodic'");
    }
    return comp;
}

std::pair<boiler::BoilerConfig, boiler::PumpCommandSchedule> parse_boiler(const YAML::Node& node) {
    require(node, node.IsMap(), "boiler must be a map");
    check_keys(node,
               {"initial_level", "pump_rates", "pump_start_delays", "vaporization_rate", "power",
                "level_limits", "schedule"},
               "boiler");
    boiler::BoilerConfig cfg;
    cfg.w0 = scalar_double(get(node, "initial_level"), "initial_level");
    auto pair_of = [&](const char* key, std::array<double, 2>& into) {
        const YAML::Node v = get(node, key);
        require(v, v.IsSequence() && v.size() == 2, std::string(key) + " must be a pair");
        into = {scalar_double(v[0], key), scalar_double(v[1], key)};
    };
    pair_of("pump_rates", cfg.pump_rates);
    pair_of("pump_start_delays", cfg.pump_start_delays);
    cfg.vaporization_rate = scalar_double(get(node, "vaporization_rate"), "vaporization_rate");
    if (node["power"]) cfg.power = scalar_double(node["power"], "power");
    std::array<double, 2> limits{};
    pair_of("level_limits", limits);
    cfg.w_min = limits[0];
    cfg.w_max = limits[1];
    try {
        cfg.validate();
    } catch (const Error& e) {
        fail(node, e.what());
    }

    boiler::PumpCommandSchedule schedule;
    if (node["schedule"]) {
        const YAML::Node list = node["schedule"];
        require(list, list.IsSequence(), "schedule must be a list");
        for (const auto& entry : list) {
            require(entry, entry.IsMap(), "schedule entry must be a map");
            check_keys(entry, {"t", "pump", "command"}, "schedule entry");
            boiler::PumpEvent ev;
            ev.time = scalar_double(get(entry, "t"), "t");
            ev.pump = static_cast<int>(scalar_double(get(entry, "pump"), "pump"));
            if (ev.pump != 1 && ev.pump != 2) fail(get(entry, "pump"), "pump must be 1 or 2");
            const std::string cmd = get(entry, "command").Scalar();
            if (cmd == "on") ev.command = boiler::PumpCommand::On;
            else if (cmd == "off") ev.command = boiler::PumpCommand::Off;
            else fail(get(entry, "command"), "command must be 'on' or 'off'");
            schedule.push_back(ev);
        }
    }
    return {cfg, schedule};
}

} // namespace

ta::Ticks ms_to_ticks(const std::string& text, ta::Ticks ticks_per_ms) {
    if (ticks_per_ms <= 0) throw Error("resolution must be positive");
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    std::int64_t mantissa = 0;
    int digits = 0, frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_dot) throw Error("malformed number '" + text + "'");
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw Error("malformed number '" + text + "' (plain decimal expected)");
        }
        seen_digit = true;
        if (++digits > 18) throw OverflowError("number '" + text + "' has too many digits");
        mantissa = mantissa * 10 + (c - '0');
        if (seen_dot) ++frac_digits;
    }
    if (!seen_digit) throw Error("malformed number '" + text + "'");

    if (mantissa > std::numeric_limits<std::int64_t>::max() / ticks_per_ms) {
        throw OverflowError("value '" + text + "' exceeds the tick representation");
    }
    std::int64_t numerator = mantissa * ticks_per_ms;
    std::int64_t scale = 1;
    for (int k = 0; k < frac_digits; ++k) scale *= 10;
    if (numerator % scale != 0) {
        throw ResolutionError("value " + text + " ms is not representable at " +
                              std::to_string(ticks_per_ms) + " ticks/ms");
    }
    const std::int64_t ticks = numerator / scale;
    return negative ? -ticks : ticks;
}

std::string ticks_to_ms_text(ta::Ticks ticks, ta::Ticks ticks_per_ms) {
    if (ticks_per_ms <= 0) throw Error("resolution must be positive");
    std::string sign = ticks < 0 ? "-" : "";
    std::uint64_t n = ticks < 0 ? static_cast<std::uint64_t>(-(ticks + 1)) + 1
                                : static_cast<std::uint64_t>(ticks);
    const std::uint64_t tpm = static_cast<std::uint64_t>(ticks_per_ms);
    std::string out = sign + std::to_string(n / tpm);
    std::uint64_t rem = n % tpm;
    if (rem == 0) return out;
    out += '.';
    for (int guard = 0; rem != 0; ++guard) {
        if (guard > 30) {
            throw ResolutionError("tick value has no finite decimal at this resolution");
        }
        rem *= 10;
        out += static_cast<char>('0' + rem / tpm);
        rem %= tpm;
    }
    return out;
}

ParsedModel parse_model(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    if (!root.IsMap()) throw ParseError(1, 1, "model document must be a map");
    check_keys(root, {"schema", "resolution", "components", "query", "boiler"}, "model");

    const std::string schema = get(root, "schema").Scalar();
    if (schema != kSchema) {
        fail(get(root, "schema"), "unsupported schema '" + schema + "' (expected " + kSchema + ")");
    }

    ParsedModel model;
    const YAML::Node res = get(root, "resolution");
    try {
        model.resolution.ticks_per_ms = res.as<std::int64_t>();
    } catch (const YAML::Exception&) {
        fail(res, "resolution must be an integer (ticks per ms)");
    }
    require(res, model.resolution.ticks_per_ms > 0, "resolution must be positive");
    const ta::Ticks tpm = model.resolution.ticks_per_ms;

    const YAML::Node comps = get(root, "components");
    require(comps, comps.IsSequence() && comps.size() > 0, "components must be a non-empty list");
    for (const auto& c : comps) model.chain.components.push_back(parse_component(c, tpm));

    const YAML::Node query = get(root, "query");
    require(query, query.IsMap(), "query must be a map");
    check_keys(query, {"stimulus", "response", "bound_ms"}, "query");
    const std::string stim_text = get(query, "stimulus").Scalar();
    const std::string resp_text = get(query, "response").Scalar();
    try {
        model.query.stimulus = verify::StateFormula::parse(stim_text);
        model.query.response = verify::StateFormula::parse(resp_text);
    } catch (const ParseError& e) {
        fail(query, std::string("bad state formula: ") + e.what());
    }
    model.query.bound_d = scalar_ms_to_ticks(get(query, "bound_ms"), tpm);
    require(query, model.query.bound_d >= 0, "bound_ms must be non-negative");
    model.chain.stimulus_label = stim_text;
    model.chain.response_label = resp_text;

    try {
        model.chain.validate();
    } catch (const Error& e) {
        fail(comps, e.what());
    }

    if (root["boiler"]) {
        auto [cfg, schedule] = parse_boiler(root["boiler"]);
        model.boiler_config = cfg;
        model.schedule = std::move(schedule);
    }
    return model;
}

ParsedModel parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

namespace {

std::string render_double(double v) {
    std::ostringstream oss;
    oss.precision(15);
    oss << v;
    return oss.str();
}

void render_interval(std::ostringstream& out, const char* key,
                     const jitter::JitterInterval& j, ta::Ticks tpm) {
    if (j.min == j.max) {
        out << "      " << key << ": " << ticks_to_ms_text(j.min, tpm) << "\n";
    } else {
        out << "      " << key << ": [" << ticks_to_ms_text(j.min, tpm) << ", "
            << ticks_to_ms_text(j.max, tpm) << "]\n";
    }
}

} // namespace

std::string render_model(const ParsedModel& model) {
    const ta::Ticks tpm = model.resolution.ticks_per_ms;
    std::ostringstream out;
    out << "schema: " << kSchema << "\n";
    out << "resolution: " << tpm << "\n";
    out << "components:\n";
    for (const auto& comp : model.chain.components) {
        out << "  - name: " << comp.name << "\n";
        if (const auto* ev = std::get_if<jitter::EventActivation>(&comp.activation)) {
            out << "    activation: event\n";
            out << "    in: " << ev->in_chan << "\n";
            out << "    out: " << ev->out_chan << "\n";
        } else {
            const auto& p = std::get<jitter::PeriodicActivation>(comp.activation);
            out << "    activation: periodic\n";
            out << "    period_ms: " << ticks_to_ms_text(p.period.period, tpm) << "\n";
            out << "    period_jitter_ms: [" << ticks_to_ms_text(p.period.jit_lb, tpm) << ", "
                << ticks_to_ms_text(p.period.jit_ub, tpm) << "]\n";
            out << "    out: " << p.out_chan << "\n";
        }
        out << "    jitter:\n";
        render_interval(out, "hardware_ms", comp.spec.hardware, tpm);
        render_interval(out, "software_ms", comp.spec.software, tpm);
        render_interval(out, "communication_ms", comp.spec.communication, tpm);
    }
    out << "query:\n";
    out << "  stimulus: " << model.query.stimulus.to_string() << "\n";
    out << "  response: " << model.query.response.to_string() << "\n";
    out << "  bound_ms: " << ticks_to_ms_text(model.query.bound_d, tpm) << "\n";
    if (model.boiler_config) {
        const auto& b = *model.boiler_config;
        out << "boiler:\n";
        out << "  initial_level: " << render_double(b.w0) << "\n";
        out << "  pump_rates: [" << render_double(b.pump_rates[0]) << ", "
            << render_double(b.pump_rates[1]) << "]\n";
        out << "  pump_start_delays: [" << render_double(b.pump_start_delays[0]) << ", "
            << render_double(b.pump_start_delays[1]) << "]\n";
        out << "  vaporization_rate: " << render_double(b.vaporization_rate) << "\n";
        out << "  power: " << render_double(b.power) << "\n";
        out << "  level_limits: [" << render_double(b.w_min) << ", " << render_double(b.w_max)
            << "]\n";
        if (!model.schedule.empty()) {
            out << "  schedule:\n";
            for (const auto& ev : model.schedule) {
                out << "    - {t: " << render_double(ev.time) << ", pump: " << ev.pump
                    << ", command: " << (ev.command == boiler::PumpCommand::On ? "on" : "off")
                    << "}\n";
            }
        }
    }
    return out.str();
}

} // namespace timechain::frontend
