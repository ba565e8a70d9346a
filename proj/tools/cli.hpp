#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evac::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evac::cli
