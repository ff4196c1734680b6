#pragma once

#include <iosfwd>

namespace certibif {

/// Command-line front end.  Returns 0 on success, 1 when a validation or
/// certification step fails, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace certibif
