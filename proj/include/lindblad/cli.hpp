// cli.hpp — Command-line surface: analyze, spectrum, predict, verify,
// structure, symmetries. Exit codes: 0 success, 1 verification mismatch,
// 2 input error, 3 numerical-tolerance failure.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lindblad::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace lindblad::cli
