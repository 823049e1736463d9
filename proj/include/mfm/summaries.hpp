#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfm/sampler.hpp"

namespace mfm {

// Posterior of K+ from a recorded chain.
struct KPlusPosteriorSummary {
  std::vector<double> histogram;  // histogram[j-1] = share of draws with K+ = j
  int mode = 0;                   // smallest maximiser
  double entropy = 0.0;           // nats
  std::size_t draws = 0;
};

// Throws std::invalid_argument on an empty trace.
KPlusPosteriorSummary summarize_kplus(const ChainTrace& trace);

// Compact JSON object {"1":p1,"2":p2,...} for the histogram.
std::string histogram_json(std::span<const double> histogram);

// One level of a sweep factor with the average posterior mode across every
// grid cell at that level.
struct FactorLevel {
  std::string label;
  double average = 0.0;
  int count = 0;
};

// Marginal averages of the posterior K+ mode over a full-factorial grid,
// one row group per factor (mixture kind, gamma/alpha value, prior on K,
// B0, C0).  Levels keep first-appearance order.  Throws
// std::invalid_argument if the settings do not form a full factorial with
// each cell appearing exactly once.
struct MarginalTable {
  std::vector<FactorLevel> by_kind, by_gamma_alpha, by_prior, by_B0, by_C0;
};

MarginalTable marginal_table(const std::vector<std::pair<MfmSetting, int>>& modes);

// Density of the component-mean prior N(b0, B0) on a grid of points.
std::vector<std::pair<double, double>> prior_mean_density_curve(double b0, double B0,
                                                                std::span<const double> grid);

// Density of 4*sigma where sigma^-2 ~ Gamma(c0, C0): how wide a component's
// central mass can stretch under the variance prior.
std::vector<std::pair<double, double>> prior_4sigma_density_curve(double c0, double C0,
                                                                  std::span<const double> grid);

}  // namespace mfm
