#pragma once

#include <iosfwd>

namespace augcl {

// Entry point of the augcl tool. Returns 0 on success, 1 on usage errors and
// 2 on runtime failures. Diagnostics go to `err`, progress to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace augcl
