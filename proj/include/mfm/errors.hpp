#pragma once

#include <stdexcept>

namespace mfm {

// An input file or inline text (data, prior spec, config, trace) that does
// not parse.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A parsed configuration whose values are inconsistent or out of range.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation that lost all mass or produced non-finite intermediates.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mfm
