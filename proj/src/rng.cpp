#include "mfm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mfm/math_util.hpp"

namespace mfm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double Rng::uniform() {
  // 53-bit mantissa resolution on [0, 1).
  return (gen_() >> 11) * 0x1.0p-53;
}

double Rng::std_normal() {
  // Box-Muller; u1 in (0, 1] so the log is finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double Rng::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw std::domain_error("normal: sd must be > 0");
  return mean + sd * std_normal();
}

double Rng::log_gamma_draw_ge1(double shape) {
  // Marsaglia-Tsang squeeze; returns log(d) + 3 log(t) so callers can stay
  // in log space.
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = std_normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d) + 3.0 * std::log(t);
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return std::log(d) + 3.0 * std::log(t);
  }
}

double Rng::log_gamma_draw(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("log_gamma_draw: shape must be > 0");
  if (shape >= 1.0) return log_gamma_draw_ge1(shape);
  // Boost for small shapes: G_a = G_{a+1} * U^{1/a}, applied in log space so
  // shapes like 1e-3 do not underflow.
  double u = 1.0 - uniform();  // (0, 1]
  return log_gamma_draw_ge1(shape + 1.0) + std::log(u) / shape;
}

double Rng::gamma(double shape, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("gamma: rate must be > 0");
  return std::exp(log_gamma_draw(shape) - std::log(rate));
}

std::vector<double> Rng::dirichlet(std::span<const double> conc) {
  if (conc.empty()) throw std::invalid_argument("dirichlet: empty concentration");
  std::vector<double> lg(conc.size());
  for (std::size_t i = 0; i < conc.size(); ++i) lg[i] = log_gamma_draw(conc[i]);
  double lse = log_sum_exp(lg);
  std::vector<double> w(conc.size());
  for (std::size_t i = 0; i < conc.size(); ++i) {
    w[i] = std::exp(lg[i] - lse);
    // Keep weights strictly positive even when a component's share is below
    // double underflow; the displaced mass is ~1e-300 and unobservable.
    if (w[i] <= 0.0) w[i] = std::numeric_limits<double>::min();
  }
  return w;
}

int Rng::categorical_from_logits(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("categorical_from_logits: empty");
  double m = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(m))
    throw std::runtime_error("categorical_from_logits: no finite logit");
  double total = 0.0;
  std::vector<double> cum(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    total += std::exp(logits[i] - m);
    cum[i] = total;
  }
  return categorical_from_cumulative(cum);
}

int Rng::categorical_from_cumulative(std::span<const double> cum) {
  if (cum.empty() || !(cum.back() > 0.0))
    throw std::invalid_argument("categorical_from_cumulative: bad weights");
  double target = uniform() * cum.back();
  auto it = std::lower_bound(cum.begin(), cum.end(), target);
  if (it == cum.end()) --it;
  return static_cast<int>(it - cum.begin());
}

}  // namespace mfm
