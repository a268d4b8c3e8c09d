#pragma once

#include <complex>
#include <iosfwd>
#include <string_view>

#include "nbspectra/scanner.hpp"

namespace nbspectra::cli {

// Parses "a", "a+bi", "a-bi", "bi", "i", "-i" with '.' decimals.
std::complex<double> parse_lambda(std::string_view s);
// "re_min,re_max,im_min,im_max"
Region parse_region(std::string_view s);
// "NxM" or "N" (square)
std::pair<int, int> parse_grid(std::string_view s);

// Exit codes: 0 ok, 1 internal error, 2 usage or validation error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nbspectra::cli
