#include "timechain/uppaal_export.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "timechain/errors.hpp"

namespace timechain::frontend {

namespace {

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words = {
        "chan",   "clock",  "bool",   "int",    "system", "process", "state", "commit",
        "urgent", "broadcast", "init", "true",  "false",  "const",   "typedef", "struct",
        "rate",   "guard",  "sync",   "assign", "meta",   "imply",   "and",     "or", "not",
    };
    return words;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') out += c;
        else out += '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "n" + out;
    while (reserved_words().count(out)) out += '_';
    return out;
}

/// Deterministic collision-free renaming within one scope.
class NameScope {
public:
    std::string intern(const std::string& original) {
        auto it = map_.find(original);
        if (it != map_.end()) return it->second;
        std::string candidate = sanitize(original);
        while (used_.count(candidate)) candidate += "_";
        used_.insert(candidate);
        map_.emplace(original, candidate);
        return candidate;
    }

    bool knows(const std::string& original) const { return map_.count(original) > 0; }

    void reserve(const std::string& name) { used_.insert(name); }

private:
    std::map<std::string, std::string> map_;
    std::set<std::string> used_;
};

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c; break;
        }
    }
    return out;
}

std::string constraint_text(const ta::ClockConstraint& c,
                            const std::vector<std::string>& clock_names) {
    std::ostringstream oss;
    if (c.bound.is_infinity()) return "true";
    if (c.right == 0) {
        oss << clock_names[c.left] << " " << c.bound.relation_text() << " " << c.bound.value();
    } else if (c.left == 0) {
        oss << clock_names[c.right] << " " << (c.bound.is_strict() ? ">" : ">=") << " "
            << -c.bound.value();
    } else {
        oss << clock_names[c.left] << " - " << clock_names[c.right] << " "
            << c.bound.relation_text() << " " << c.bound.value();
    }
    return oss.str();
}

std::string conjunction_text(const std::vector<ta::ClockConstraint>& cs,
                             const std::vector<std::string>& clock_names) {
    std::string out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += " && ";
        out += constraint_text(cs[i], clock_names);
    }
    return out;
}

/// The local display name UPPAAL sees for a member clock: the automaton-name
/// prefix added by parallel composition is dropped inside its own template.
std::string local_clock_name(const ta::TimedAutomaton& a, std::size_t clock) {
    const std::string& full = a.clocks[clock];
    const std::string prefix = a.name + ".";
    if (full.rfind(prefix, 0) == 0) return full.substr(prefix.size());
    return full;
}

struct Atom {
    std::size_t automaton;
    std::size_t location;
};

Atom resolve_atom(const verify::StateFormula& f, const ta::Network& net, const char* role) {
    if (f.kind() != verify::StateFormula::Kind::Atom) {
        throw UnsupportedFeature(std::string(role) +
                                 " must be a single location atom for UPPAAL export");
    }
    const std::size_t ai = net.automaton_index(f.automaton());
    return {ai, net.automata[ai].location_index(f.location())};
}

} // namespace

UppaalExport export_uppaal(const ta::Network& net, const verify::Query& query) {
    net.validate();
    const Atom stimulus = resolve_atom(query.stimulus, net, "stimulus");
    const Atom response = resolve_atom(query.response, net, "response");

    NameScope globals;
    // Process/template names first so channels never steal them.
    std::vector<std::string> process_names;
    for (const auto& a : net.automata) process_names.push_back(globals.intern(a.name));
    std::vector<std::string> channel_names;
    for (const auto& c : net.channels) channel_names.push_back(globals.intern(c));
    const std::string obs_z = globals.intern("obs_z");
    const std::string obs_armed = globals.intern("obs_armed");

    const bool armed_at_start = net.automata[stimulus.automaton].initial == stimulus.location;

    std::ostringstream xml;
    xml << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
    xml << "<!DOCTYPE nta PUBLIC '-//Uppaal Team//DTD Flat System 1.1//EN' "
           "'http://www.it.uu.se/research/group/darts/uppaal/flat-1_1.dtd'>\n";
    xml << "<nta>\n";
    xml << "<declaration>\n";
    for (const auto& c : channel_names) xml << "chan " << c << ";\n";
    xml << "clock " << obs_z << ";\n";
    xml << "bool " << obs_armed << " = " << (armed_at_start ? "true" : "false") << ";\n";
    xml << "</declaration>\n";

    for (std::size_t ai = 0; ai < net.automata.size(); ++ai) {
        const auto& a = net.automata[ai];
        NameScope locals;
        // Keep global names visible inside the template.
        for (const auto& p : process_names) locals.reserve(p);
        for (const auto& c : channel_names) locals.reserve(c);
        locals.reserve(obs_z);
        locals.reserve(obs_armed);

        std::vector<std::string> clock_names(a.clocks.size());
        clock_names[0] = "0";
        for (std::size_t c = 1; c < a.clocks.size(); ++c) {
            clock_names[c] = locals.intern(local_clock_name(a, c));
        }
        std::vector<std::string> location_names(a.locations.size());
        for (std::size_t l = 0; l < a.locations.size(); ++l) {
            location_names[l] = locals.intern(a.locations[l].id);
        }

        xml << "<template>\n";
        xml << "<name>" << process_names[ai] << "</name>\n";
        if (a.clocks.size() > 1) {
            xml << "<declaration>";
            for (std::size_t c = 1; c < a.clocks.size(); ++c) {
                xml << "clock " << clock_names[c] << "; ";
            }
            xml << "</declaration>\n";
        }
        for (std::size_t l = 0; l < a.locations.size(); ++l) {
            xml << "<location id=\"id" << ai << "_" << l << "\">";
            xml << "<name>" << location_names[l] << "</name>";
            if (!a.locations[l].invariant.empty()) {
                xml << "<label kind=\"invariant\">"
                    << xml_escape(conjunction_text(a.locations[l].invariant, clock_names))
                    << "</label>";
            }
            xml << "</location>\n";
        }
        xml << "<init ref=\"id" << ai << "_" << a.initial << "\"/>\n";

        for (const auto& e : a.edges) {
            xml << "<transition>";
            xml << "<source ref=\"id" << ai << "_" << e.source << "\"/>";
            xml << "<target ref=\"id" << ai << "_" << e.target << "\"/>";
            if (!e.guard.empty()) {
                xml << "<label kind=\"guard\">"
                    << xml_escape(conjunction_text(e.guard, clock_names)) << "</label>";
            }
            if (e.sync) {
                // channels were interned in net.channels iteration order
                auto it = net.channels.find(e.sync->channel);
                const std::string channel = channel_names[static_cast<std::size_t>(
                        std::distance(net.channels.begin(), it))];
                xml << "<label kind=\"synchronisation\">" << channel
                    << (e.sync->direction == ta::SyncDirection::Emit ? "!" : "?") << "</label>";
            }
            std::vector<std::string> assignments;
            for (std::size_t r : e.resets) assignments.push_back(clock_names[r] + " = 0");
            if (ai == stimulus.automaton && e.target == stimulus.location) {
                assignments.push_back(obs_z + " = 0");
                assignments.push_back(obs_armed + " = true");
            }
            if (ai == response.automaton && e.target == response.location) {
                assignments.push_back(obs_armed + " = false");
            }
            if (!assignments.empty()) {
                std::string joined;
                for (std::size_t i = 0; i < assignments.size(); ++i) {
                    if (i) joined += ", ";
                    joined += assignments[i];
                }
                xml << "<label kind=\"assignment\">" << xml_escape(joined) << "</label>";
            }
            xml << "</transition>\n";
        }
        xml << "</template>\n";
    }

    xml << "<system>\nsystem ";
    for (std::size_t i = 0; i < process_names.size(); ++i) {
        if (i) xml << ", ";
        xml << process_names[i];
    }
    xml << ";\n</system>\n";
    xml << "</nta>\n";

    std::ostringstream queries;
    queries << "// bounded leads-to: every stimulus is answered within "
            << query.bound_d << " ticks\n";
    queries << "A[] (" << obs_armed << " imply " << obs_z << " <= " << query.bound_d << ")\n";

    auto atom_text = [&](const Atom& atom) {
        const auto& a = net.automata[atom.automaton];
        NameScope locals;
        for (const auto& p : process_names) locals.reserve(p);
        for (const auto& c : channel_names) locals.reserve(c);
        locals.reserve(obs_z);
        locals.reserve(obs_armed);
        for (std::size_t c = 1; c < a.clocks.size(); ++c) locals.intern(local_clock_name(a, c));
        std::string loc_name;
        for (std::size_t l = 0; l < a.locations.size(); ++l) {
            const std::string n = locals.intern(a.locations[l].id);
            if (l == atom.location) loc_name = n;
        }
        return process_names[atom.automaton] + "." + loc_name;
    };
    queries << "// plain leads-to (no bound)\n";
    queries << atom_text(stimulus) << " --> " << atom_text(response) << "\n";

    return {xml.str(), queries.str()};
}

namespace {

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::string attrs;

    std::string attr(const std::string& key) const {
        const std::string needle = key + "=\"";
        const auto at = attrs.find(needle);
        if (at == std::string::npos) return {};
        const auto end = attrs.find('"', at + needle.size());
        if (end == std::string::npos) return {};
        return attrs.substr(at + needle.size(), end - at - needle.size());
    }
};

std::vector<Tag> scan_tags(const std::string& xml) {
    std::vector<Tag> tags;
    std::size_t pos = 0;
    while ((pos = xml.find('<', pos)) != std::string::npos) {
        const std::size_t end = xml.find('>', pos);
        if (end == std::string::npos) throw Error("uppaal export: unterminated tag");
        std::string body = xml.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (body.empty()) throw Error("uppaal export: empty tag");
        if (body[0] == '?' || body[0] == '!') continue; // prolog / doctype
        Tag tag;
        if (body[0] == '/') {
            tag.closing = true;
            body = body.substr(1);
        }
        if (!body.empty() && body.back() == '/') {
            tag.self_closing = true;
            body.pop_back();
        }
        const std::size_t space = body.find_first_of(" \t\n");
        tag.name = body.substr(0, space);
        if (space != std::string::npos) tag.attrs = body.substr(space + 1);
        tags.push_back(std::move(tag));
    }
    return tags;
}

} // namespace

void validate_uppaal_export(const std::string& xml) {
    if (xml.rfind("<?xml", 0) != 0) throw Error("uppaal export: missing XML declaration");
    if (xml.find("<!DOCTYPE nta") == std::string::npos) {
        throw Error("uppaal export: missing nta DOCTYPE");
    }

    const auto tags = scan_tags(xml);
    std::vector<std::string> stack;
    std::size_t templates = 0, systems = 0;
    std::set<std::string> location_ids;
    bool has_init = false;
    std::vector<std::pair<std::string, std::string>> pending_refs; // (kind, ref)

    auto close_template = [&]() {
        if (!has_init) throw Error("uppaal export: template without <init>");
        for (const auto& [kind, ref] : pending_refs) {
            if (!location_ids.count(ref)) {
                throw Error("uppaal export: " + kind + " references unknown location '" + ref +
                            "'");
            }
        }
        location_ids.clear();
        pending_refs.clear();
        has_init = false;
    };

    for (const auto& tag : tags) {
        if (tag.closing) {
            if (stack.empty() || stack.back() != tag.name) {
                throw Error("uppaal export: mismatched closing tag </" + tag.name + ">");
            }
            stack.pop_back();
            if (tag.name == "template") close_template();
            continue;
        }
        if (tag.name == "template") ++templates;
        if (tag.name == "system") ++systems;
        if (tag.name == "location") {
            const std::string id = tag.attr("id");
            if (id.empty()) throw Error("uppaal export: location without id");
            if (!location_ids.insert(id).second) {
                throw Error("uppaal export: duplicate location id '" + id + "'");
            }
        }
        if (tag.name == "init") {
            has_init = true;
            pending_refs.emplace_back("init", tag.attr("ref"));
        }
        if (tag.name == "source" || tag.name == "target") {
            pending_refs.emplace_back(tag.name, tag.attr("ref"));
        }
        if (!tag.self_closing) stack.push_back(tag.name);
    }
    if (!stack.empty()) throw Error("uppaal export: unclosed tag <" + stack.back() + ">");
    if (templates == 0) throw Error("uppaal export: no templates");
    if (systems != 1) throw Error("uppaal export: expected exactly one <system> section");
}

} // namespace timechain::frontend
