#include "mfm/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mfm/math_util.hpp"

namespace mfm {

KPlusPosteriorSummary summarize_kplus(const ChainTrace& trace) {
  if (trace.draws() == 0) throw std::invalid_argument("summarize_kplus: empty trace");
  int max_j = *std::max_element(trace.k_plus.begin(), trace.k_plus.end());
  KPlusPosteriorSummary s;
  s.draws = trace.draws();
  s.histogram.assign(max_j, 0.0);
  for (int j : trace.k_plus) {
    if (j < 1) throw std::invalid_argument("summarize_kplus: K+ draw below 1");
    s.histogram[j - 1] += 1.0;
  }
  for (double& v : s.histogram) v /= static_cast<double>(s.draws);
  s.mode = static_cast<int>(argmax_index(s.histogram)) + 1;
  s.entropy = entropy_nats(s.histogram);
  return s;
}

std::string histogram_json(std::span<const double> histogram) {
  std::string out = "{";
  char buf[64];
  for (std::size_t j = 0; j < histogram.size(); ++j) {
    if (j) out += ",";
    std::snprintf(buf, sizeof(buf), "\"%zu\":%.12g", j + 1, histogram[j]);
    out += buf;
  }
  out += "}";
  return out;
}

namespace {

// Accumulates per-level sums in first-appearance order.
struct LevelAverager {
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, int>> sums;

  void add(const std::string& label, int mode) {
    auto [it, fresh] = sums.try_emplace(label, 0.0, 0);
    if (fresh) order.push_back(label);
    it->second.first += mode;
    it->second.second += 1;
  }
  std::vector<FactorLevel> finish() const {
    std::vector<FactorLevel> out;
    for (const auto& label : order) {
      const auto& [sum, count] = sums.at(label);
      out.push_back({label, sum / count, count});
    }
    return out;
  }
};

}  // namespace

MarginalTable marginal_table(const std::vector<std::pair<MfmSetting, int>>& modes) {
  if (modes.empty()) throw std::invalid_argument("marginal_table: no settings");
  LevelAverager kind, value, prior, B0, C0;
  std::set<std::string> cells;
  for (const auto& [setting, mode] : modes) {
    std::string k = to_string(setting.schedule.kind);
    std::string v = format_number(setting.schedule.value);
    std::string p = setting.prior_k.str();
    std::string b = format_number(setting.B0);
    std::string c = format_number(setting.C0);
    std::string cell = k + "|" + v + "|" + p + "|" + b + "|" + c;
    if (!cells.insert(cell).second)
      throw std::invalid_argument("marginal_table: duplicate grid cell " + cell);
    kind.add(k, mode);
    value.add(v, mode);
    prior.add(p, mode);
    B0.add(b, mode);
    C0.add(c, mode);
  }
  std::size_t expect = kind.order.size() * value.order.size() * prior.order.size() *
                       B0.order.size() * C0.order.size();
  if (cells.size() != expect) {
    std::ostringstream msg;
    msg << "marginal_table: grid is not a full factorial (" << cells.size() << " cells, need "
        << expect << ")";
    throw std::invalid_argument(msg.str());
  }
  MarginalTable t;
  t.by_kind = kind.finish();
  t.by_gamma_alpha = value.finish();
  t.by_prior = prior.finish();
  t.by_B0 = B0.finish();
  t.by_C0 = C0.finish();
  return t;
}

std::vector<std::pair<double, double>> prior_mean_density_curve(double b0, double B0,
                                                                std::span<const double> grid) {
  if (!(B0 > 0.0)) throw std::domain_error("prior_mean_density_curve: B0 must be > 0");
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  double norm = 1.0 / std::sqrt(2.0 * M_PI * B0);
  for (double x : grid) {
    double d = x - b0;
    out.emplace_back(x, norm * std::exp(-d * d / (2.0 * B0)));
  }
  return out;
}

std::vector<std::pair<double, double>> prior_4sigma_density_curve(double c0, double C0,
                                                                  std::span<const double> grid) {
  if (!(c0 > 0.0) || !(C0 > 0.0))
    throw std::domain_error("prior_4sigma_density_curve: c0, C0 must be > 0");
  // T = 4 sigma with sigma^-2 ~ Gamma(c0, C0): substituting g = 16/t^2 into
  // the Gamma density with |dg/dt| = 32/t^3.
  double lognorm = c0 * std::log(C0) - std::lgamma(c0);
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double t : grid) {
    if (!(t > 0.0)) {
      out.emplace_back(t, 0.0);
      continue;
    }
    double g = 16.0 / (t * t);
    double logf = lognorm + (c0 - 1.0) * std::log(g) - C0 * g + std::log(32.0) -
                  3.0 * std::log(t);
    out.emplace_back(t, std::exp(logf));
  }
  return out;
}

}  // namespace mfm
