#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mfm {

// Deterministic random stream: a seeded mt19937_64 plus the handful of
// samplers the model needs.  All gamma draws use the shape-rate convention
// (mean = shape/rate).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform();

  double normal(double mean, double sd);

  // Gamma(shape, rate); shape > 0, rate > 0.
  double gamma(double shape, double rate);

  // log of a Gamma(shape, 1) draw.  Stable for arbitrarily small shapes,
  // where a plain draw would underflow to zero.
  double log_gamma_draw(double shape);

  // Symmetric or general Dirichlet from a vector of concentrations.
  // Computed from log-gamma draws so that tiny concentrations (e.g. alpha/K
  // with large K) still give strictly positive weights that sum to one.
  std::vector<double> dirichlet(std::span<const double> conc);

  // Index draw proportional to exp(logits[i]); at least one entry must be
  // finite.
  int categorical_from_logits(std::span<const double> logits);

  // Index draw from an unnormalised non-negative weight cumulative sum
  // (cum.back() > 0 required).
  int categorical_from_cumulative(std::span<const double> cum);

  std::mt19937_64& raw() { return gen_; }

 private:
  std::mt19937_64 gen_;
  double std_normal();
  // log of a Gamma(shape, 1) draw for shape >= 1 (Marsaglia-Tsang).
  double log_gamma_draw_ge1(double shape);
};

}  // namespace mfm
