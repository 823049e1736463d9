#include "mfm/prior_k.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mfm/errors.hpp"
#include "mfm/math_util.hpp"

namespace mfm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lbeta(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}
}  // namespace

std::string to_string(MfmKind kind) {
  return kind == MfmKind::static_mfm ? "static" : "dynamic";
}

MfmKind parse_mfm_kind(std::string_view s) {
  if (s == "static") return MfmKind::static_mfm;
  if (s == "dynamic") return MfmKind::dynamic_mfm;
  throw ParseError("unknown mixture kind '" + std::string(s) +
                   "' (expected 'static' or 'dynamic')");
}

double DirichletSchedule::gamma_at(int K) const {
  if (K < 1) throw std::domain_error("gamma_at: K must be >= 1");
  return kind == MfmKind::static_mfm ? value : value / K;
}

DirichletSchedule static_schedule(double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("static_schedule: gamma must be > 0");
  return {MfmKind::static_mfm, gamma};
}

DirichletSchedule dynamic_schedule(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("dynamic_schedule: alpha must be > 0");
  return {MfmKind::dynamic_mfm, alpha};
}

PriorOnK PriorOnK::uniform_on(int a, int b) {
  if (a < 1 || b < a) throw std::domain_error("uniform prior: need 1 <= a <= b");
  PriorOnK q;
  q.kind = PriorKind::uniform;
  q.a = a;
  q.b = b;
  return q;
}

PriorOnK PriorOnK::trunc_poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("trunc_poisson: lambda must be > 0");
  PriorOnK q;
  q.kind = PriorKind::trunc_poisson;
  q.lambda = lambda;
  return q;
}

PriorOnK PriorOnK::shifted_geometric(double p) {
  if (!(p > 0.0) || p > 1.0)
    throw std::domain_error("shifted_geometric: need 0 < p <= 1");
  PriorOnK q;
  q.kind = PriorKind::shifted_geometric;
  q.p = p;
  return q;
}

PriorOnK PriorOnK::shifted_bnb(double alpha, double a, double b) {
  if (!(alpha > 0.0) || !(a > 0.0) || !(b > 0.0))
    throw std::domain_error("shifted_bnb: all parameters must be > 0");
  PriorOnK q;
  q.kind = PriorKind::shifted_bnb;
  q.bnb_alpha = alpha;
  q.bnb_a = a;
  q.bnb_b = b;
  return q;
}

double PriorOnK::log_pmf(int k) const {
  if (k < 1) throw std::domain_error("prior on K: k must be >= 1");
  switch (kind) {
    case PriorKind::uniform:
      return (k < a || k > b) ? kNegInf : -std::log(static_cast<double>(b - a + 1));
    case PriorKind::trunc_poisson:
      // Poisson(lambda) conditioned on k >= 1.
      return k * std::log(lambda) - lambda - std::lgamma(k + 1.0) -
             std::log1p(-std::exp(-lambda));
    case PriorKind::shifted_geometric: {
      if (p == 1.0) return k == 1 ? 0.0 : kNegInf;
      return std::log(p) + (k - 1) * std::log1p(-p);
    }
    case PriorKind::shifted_bnb: {
      double x = k - 1.0;
      return std::lgamma(bnb_alpha + x) - std::lgamma(bnb_alpha) - std::lgamma(x + 1.0) +
             lbeta(bnb_alpha + bnb_a, x + bnb_b) - lbeta(bnb_a, bnb_b);
    }
  }
  throw std::logic_error("unreachable prior kind");
}

double PriorOnK::pmf(int k) const { return std::exp(log_pmf(k)); }

namespace {

// pmf(k+1)/pmf(k) inside the support, used to walk the series cheaply.
double pmf_ratio(const PriorOnK& q, int k) {
  switch (q.kind) {
    case PriorKind::uniform:
      return k + 1 <= q.b ? 1.0 : 0.0;
    case PriorKind::trunc_poisson:
      return q.lambda / (k + 1);
    case PriorKind::shifted_geometric:
      return 1.0 - q.p;
    case PriorKind::shifted_bnb: {
      double x = k - 1.0;
      return (q.bnb_alpha + x) * (q.bnb_b + x) /
             ((x + 1.0) * (q.bnb_alpha + q.bnb_a + q.bnb_b + x));
    }
  }
  throw std::logic_error("unreachable prior kind");
}

}  // namespace

std::pair<double, double> PriorOnK::moments() const {
  if (kind == PriorKind::uniform) {
    double m = 0.5 * (a + b);
    double w = b - a + 1.0;
    return {m, (w * w - 1.0) / 12.0};
  }
  KahanSum m1, m2;
  double pk = pmf(1);
  for (long long k = 1;; ++k) {
    double kd = static_cast<double>(k);
    m1.add(kd * pk);
    m2.add(kd * kd * pk);
    if (pk == 0.0) break;
    // Tail terms decay at least geometrically past the bulk for these
    // families, so once k^3 * pmf(k) is negligible against the accumulated
    // second moment the remaining contribution to mean and variance is too.
    if (k >= 64 && kd * kd * kd * pk < 1e-12 * std::max(m2.value(), 1.0)) break;
    if (k > (1ll << 32))
      throw std::runtime_error("moments: series did not converge");
    pk *= pmf_ratio(*this, static_cast<int>(k));
  }
  double mean = m1.value();
  return {mean, m2.value() - mean * mean};
}

int PriorOnK::tail_truncation(double eps) const {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::domain_error("tail_truncation: need 0 < eps < 1");
  KahanSum cum;
  double pk = pmf(1);
  for (int k = 1; k <= 100'000'000; ++k) {
    cum.add(pk);
    if (1.0 - cum.value() < eps) return k;
    pk *= pmf_ratio(*this, k);
  }
  throw std::runtime_error("tail_truncation: eps not reachable within 1e8 terms");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string PriorOnK::str() const {
  switch (kind) {
    case PriorKind::uniform:
      return "uniform(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case PriorKind::trunc_poisson:
      return "trpois(" + format_number(lambda) + ")";
    case PriorKind::shifted_geometric:
      return "geom(" + format_number(p) + ")";
    case PriorKind::shifted_bnb:
      return "bnb(" + format_number(bnb_alpha) + "," + format_number(bnb_a) + "," +
             format_number(bnb_b) + ")";
  }
  throw std::logic_error("unreachable prior kind");
}

std::string PriorOnK::id_token() const {
  switch (kind) {
    case PriorKind::uniform:
      return "unif" + std::to_string(a) + "-" + std::to_string(b);
    case PriorKind::trunc_poisson:
      return "trpois" + format_number(lambda);
    case PriorKind::shifted_geometric:
      return "geom" + format_number(p);
    case PriorKind::shifted_bnb:
      return "bnb" + format_number(bnb_alpha) + "-" + format_number(bnb_a) + "-" +
             format_number(bnb_b);
  }
  throw std::logic_error("unreachable prior kind");
}

namespace {

std::vector<double> parse_arg_list(std::string_view text, std::string_view args,
                                   std::size_t want) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= args.size()) {
    std::size_t comma = args.find(',', pos);
    std::string tok(args.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError("bad prior argument '" + tok + "' in '" + std::string(text) + "'");
    }
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    if (used != tok.size())
      throw ParseError("bad prior argument '" + tok + "' in '" + std::string(text) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != want)
    throw ParseError("prior '" + std::string(text) + "': expected " + std::to_string(want) +
                     " argument(s), got " + std::to_string(out.size()));
  return out;
}

int as_int(double v, std::string_view text) {
  if (v != std::floor(v) || std::fabs(v) > 1e9)
    throw ParseError("prior '" + std::string(text) + "': expected an integer bound");
  return static_cast<int>(v);
}

}  // namespace

PriorOnK PriorOnK::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  std::size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw ParseError("bad prior spec '" + std::string(text) +
                     "' (expected name(arg,...), e.g. trpois(3))");
  std::string name = s.substr(0, open);
  std::string args = s.substr(open + 1, s.size() - open - 2);
  try {
    if (name == "uniform" || name == "unif") {
      auto v = parse_arg_list(text, args, 2);
      return uniform_on(as_int(v[0], text), as_int(v[1], text));
    }
    if (name == "trpois") {
      auto v = parse_arg_list(text, args, 1);
      return trunc_poisson(v[0]);
    }
    if (name == "geom") {
      auto v = parse_arg_list(text, args, 1);
      return shifted_geometric(v[0]);
    }
    if (name == "bnb") {
      auto v = parse_arg_list(text, args, 3);
      return shifted_bnb(v[0], v[1], v[2]);
    }
  } catch (const std::domain_error& e) {
    throw ParseError("prior '" + std::string(text) + "': " + e.what());
  }
  throw ParseError("unknown prior family '" + name + "' in '" + std::string(text) +
                   "' (known: uniform, trpois, geom, bnb)");
}

}  // namespace mfm
