#pragma once

#include <string>

#include "timechain/ta.hpp"
#include "timechain/verifier.hpp"

namespace timechain::frontend {

struct UppaalExport {
    std::string model_xml;
    std::string queries;
};

/// Network in UPPAAL's flat XML format plus the matching query file, for
/// independent cross-checking. The bounded leads-to query is encoded with an
/// observer clock and flag decorated onto the stimulus/response edges; the
/// query file carries `A[] (armed imply z <= d)` along with the plain
/// leads-to. Output is deterministic. Throws UnsupportedFeature when the
/// stimulus or response is not a single location atom.
UppaalExport export_uppaal(const ta::Network& net, const verify::Query& query);

/// Syntactic well-formedness check of the exported subset (tag structure,
/// location id references, init presence). Throws Error on problems.
void validate_uppaal_export(const std::string& xml);

} // namespace timechain::frontend
