#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slowmani {

// Runs the command-line tool.  Exit codes: 0 success, 1 usage error,
// 2 parse/spec error, 3 mathematical failure, 4 numeric validation failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1e-1.5" style tokens: fractional powers of ten are accepted.
double parse_eps_token(const std::string& tok);

} // namespace slowmani
