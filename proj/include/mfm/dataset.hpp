#pragma once

#include <span>
#include <string>
#include <vector>

#include "mfm/errors.hpp"

namespace mfm {

// Observations in ascending order.
struct Dataset {
  std::vector<double> values;

  int n() const { return static_cast<int>(values.size()); }
  double min() const { return values.front(); }
  double max() const { return values.back(); }
  // Midpoint of the observed range, the default prior mean b0.
  double midpoint() const { return 0.5 * (min() + max()); }
  // Squared range, the scale anchor for the prior variance B0.
  double range_squared() const;
  // Unbiased sample variance.
  double sample_variance() const;
};

// The bundled galaxy velocities (units of 1000 km/s), 82 values ascending.
std::span<const double> galaxy_velocities();

// Loads a dataset.  `source` is either the tag "builtin:galaxy" or a path to
// a plain-text file with one value per line; blank lines and lines starting
// with '#' are skipped.  Values are sorted ascending.  Throws ParseError on
// malformed or empty input.
Dataset load_dataset(const std::string& source);

}  // namespace mfm
