#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mbrkit::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code; errors are reported on `err` as "error: ...".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "5:100:5" (start:stop:step, inclusive), "5,10,20", or a mix "1,5:20:5".
std::vector<std::size_t> parse_grid(std::string_view text);

/// Comma-separated probabilities.
std::vector<double> parse_probabilities(std::string_view text);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

}  // namespace mbrkit::cli
