#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mednlu {

// Runs one CLI invocation. args excludes the program name. Returns the
// process exit code: 0 on success, 1 on a domain error, 2 on bad usage.
int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                std::ostream& err);

} // namespace mednlu
