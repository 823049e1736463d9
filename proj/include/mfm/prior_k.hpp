#pragma once

#include <string>
#include <string_view>
#include <utility>

namespace mfm {

// Whether the Dirichlet concentration is a fixed gamma for every K (static
// MFM) or decays as alpha/K (dynamic MFM).
enum class MfmKind { static_mfm, dynamic_mfm };

std::string to_string(MfmKind kind);
MfmKind parse_mfm_kind(std::string_view s);

// Per-K Dirichlet concentration gamma_K.
struct DirichletSchedule {
  MfmKind kind;
  double value;  // gamma (static) or alpha (dynamic); > 0

  double gamma_at(int K) const;
};

DirichletSchedule static_schedule(double gamma);
DirichletSchedule dynamic_schedule(double alpha);

enum class PriorKind { uniform, trunc_poisson, shifted_geometric, shifted_bnb };

// Prior on the number of mixture components K (support in {1, 2, ...}).
// Four families: uniform on {a..b}, zero-truncated Poisson(lambda),
// geometric on K-1 (pmf p(1-p)^{k-1}), and beta-negative-binomial on K-1.
struct PriorOnK {
  PriorKind kind = PriorKind::uniform;
  // uniform bounds
  int a = 1, b = 1;
  // trunc_poisson
  double lambda = 0.0;
  // shifted_geometric
  double p = 0.0;
  // shifted_bnb
  double bnb_alpha = 0.0, bnb_a = 0.0, bnb_b = 0.0;

  static PriorOnK uniform_on(int a, int b);
  static PriorOnK trunc_poisson(double lambda);
  static PriorOnK shifted_geometric(double p);
  static PriorOnK shifted_bnb(double alpha, double a, double b);

  // P(K = k); throws std::domain_error for k < 1.  Zero outside the support.
  double pmf(int k) const;
  double log_pmf(int k) const;  // -inf where pmf is zero

  // (mean, variance), exact for the uniform family and by compensated series
  // summation otherwise.  The series stops once the remaining terms cannot
  // move the second moment at relative 1e-12.
  std::pair<double, double> moments() const;

  // Smallest k_max with P(K > k_max) < eps; requires 0 < eps < 1.
  int tail_truncation(double eps) const;

  // Canonical text form, e.g. "trpois(3)"; parse() accepts exactly these
  // shapes (case-insensitive, spaces allowed).
  std::string str() const;
  // Filename-safe token, e.g. "trpois3", "unif1-30", "bnb1-4-3".
  std::string id_token() const;
  static PriorOnK parse(std::string_view text);
};

// "6.3" for 6.3, "1" for 1.0 — shortest round-trip-ish form for labels/ids.
std::string format_number(double v);

}  // namespace mfm
