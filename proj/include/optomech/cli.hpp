#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optomech::cli {

/// Exit codes: 0 success, 1 validation/config error, 2 physics error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optomech::cli
