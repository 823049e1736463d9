#pragma once

#include <optional>
#include <string>

#include "mfm/dataset.hpp"
#include "mfm/prior_k.hpp"

namespace mfm {

// One model configuration of the sensitivity grid: a prior on K, a
// concentration schedule, and the component-parameter hyperpriors
//   mu_k ~ N(b0, B0),   sigma_k^-2 ~ Gamma(c0, C0)  (shape-rate).
struct MfmSetting {
  PriorOnK prior_k;
  DirichletSchedule schedule{MfmKind::static_mfm, 1.0};
  double B0 = 20.0;
  double C0 = 5.0;
  std::optional<double> b0;  // empty: use the data midpoint
  double c0 = 2.0;

  // Stable filename-safe identifier, e.g. "trpois3_static_g1_B20_C5".
  // Non-default b0/c0 are appended so distinct settings never collide.
  std::string setting_id() const;
};

// Hyperparameters with b0 resolved against the data.
struct ComponentPriors {
  double b0, B0, c0, C0;
};

ComponentPriors resolve_component_priors(const MfmSetting& setting, const Dataset& data);

}  // namespace mfm
