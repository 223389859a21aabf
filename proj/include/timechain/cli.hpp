#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace timechain::frontend {

/// Command-line entry point. `args` excludes the program name.
/// Exit codes: 0 satisfied/ok, 1 violated, 2 error or resources exhausted.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace timechain::frontend
