#pragma once

#include <iosfwd>

namespace geocode::cli {

/// Entry point of the geocode command. Results go to `out`; failures are
/// printed to `err` as an ApiError JSON document. Returns the exit status:
/// 0 success, 2 request errors, 3 evaluation failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geocode::cli
