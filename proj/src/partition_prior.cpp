#include "mfm/partition_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mfm/math_util.hpp"

namespace mfm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ClusterSizes::ClusterSizes(std::vector<int> c) : counts(std::move(c)) {
  if (counts.empty()) throw std::invalid_argument("ClusterSizes: no clusters");
  for (int v : counts)
    if (v < 1) throw std::invalid_argument("ClusterSizes: counts must be >= 1");
}

int ClusterSizes::n() const { return std::accumulate(counts.begin(), counts.end(), 0); }

double log_eppf_given_k(const ClusterSizes& sizes, int K, const DirichletSchedule& schedule) {
  int kp = sizes.k_plus();
  if (K < kp) throw std::domain_error("log_eppf_given_k: K must be >= number of clusters");
  double g = schedule.gamma_at(K);
  double n = sizes.n();
  double lp = std::lgamma(K + 1.0) - std::lgamma(K - kp + 1.0) + std::lgamma(K * g) -
              std::lgamma(n + K * g);
  for (int nk : sizes.counts) lp += std::lgamma(nk + g) - std::lgamma(g);
  return lp;
}

double KPlusDistribution::prob(int j) const {
  if (j < 1 || j > max_j()) return 0.0;
  return probs[j - 1];
}

int KPlusDistribution::mode() const {
  if (probs.empty()) throw std::invalid_argument("KPlusDistribution: empty");
  return static_cast<int>(argmax_index(probs)) + 1;
}

double KPlusDistribution::entropy() const { return entropy_nats(probs); }

namespace {

// Rows of the block-size convolution.  Row j holds
//   S_j(m) = sum over compositions (m_1..m_j), m_t >= 1, sum m_t = m,
//            of prod_t w(m_t),          w(m) = Gamma(m+g) / (Gamma(g) m!),
// stored as scaled[m] * exp(log_scale) with max(scaled) == 1 so that rows
// stay inside double range for any gamma.
struct ScaledRow {
  std::vector<double> scaled;  // index m = 0..n
  double log_scale = 0.0;
};

// log S_j(n) for j = 1..jmax.
std::vector<double> log_block_sums(double g, int n, int jmax) {
  std::vector<double> logw(n + 1, kNegInf);
  double lgg = std::lgamma(g);
  for (int m = 1; m <= n; ++m)
    logw[m] = std::lgamma(m + g) - lgg - std::lgamma(m + 1.0);
  double wmax = *std::max_element(logw.begin() + 1, logw.end());
  std::vector<double> w(n + 1, 0.0);
  for (int m = 1; m <= n; ++m) w[m] = std::exp(logw[m] - wmax);

  ScaledRow row;
  row.scaled = w;
  row.log_scale = wmax;
  std::vector<double> out(jmax + 1, kNegInf);
  auto record = [&](int j) {
    if (row.scaled[n] > 0.0) out[j] = std::log(row.scaled[n]) + row.log_scale;
  };
  record(1);
  std::vector<double> next(n + 1);
  for (int j = 2; j <= jmax; ++j) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int m = j; m <= n; ++m) {
      double s = 0.0;
      for (int u = j - 1; u <= m - 1; ++u) s += row.scaled[u] * w[m - u];
      next[m] = s;
    }
    double mx = *std::max_element(next.begin(), next.end());
    if (!(mx > 0.0)) break;  // everything underflowed: remaining rows are negligible
    for (double& v : next) v /= mx;
    row.scaled.swap(next);
    row.log_scale += wmax + std::log(mx);
    record(j);
  }
  return out;
}

// log of the composition-independent factor C(K,j) n! Gamma(Kg)/Gamma(n+Kg).
double log_mix_factor(int K, int j, int n, double g) {
  return lchoose(K, j) + std::lgamma(n + 1.0) + std::lgamma(K * g) - std::lgamma(n + K * g);
}

KPlusDistribution assemble(int K, int n, double g, const std::vector<double>& log_s) {
  int jmax = std::min(K, n);
  std::vector<double> lp(jmax);
  for (int j = 1; j <= jmax; ++j) lp[j - 1] = log_mix_factor(K, j, n, g) + log_s[j];
  double lse = log_sum_exp(lp);
  if (!std::isfinite(lse))
    throw std::runtime_error("kplus_given_k: distribution vanished numerically");
  KPlusDistribution dist;
  dist.n = n;
  dist.probs.resize(jmax);
  KahanSum total;
  for (int j = 0; j < jmax; ++j) {
    dist.probs[j] = std::exp(lp[j] - lse);
    total.add(dist.probs[j]);
  }
  for (double& v : dist.probs) v /= total.value();
  return dist;
}

void trim_and_normalise(KPlusDistribution& dist) {
  while (dist.probs.size() > 1 && dist.probs.back() < 1e-15) dist.probs.pop_back();
  KahanSum total;
  for (double v : dist.probs) total.add(v);
  if (!(total.value() > 0.0))
    throw std::runtime_error("induced_kplus_prior: distribution vanished numerically");
  for (double& v : dist.probs) v /= total.value();
}

}  // namespace

KPlusDistribution kplus_given_k(int K, int n, const DirichletSchedule& schedule) {
  if (K < 1) throw std::domain_error("kplus_given_k: K must be >= 1");
  if (n < 1) throw std::domain_error("kplus_given_k: n must be >= 1");
  double g = schedule.gamma_at(K);
  auto log_s = log_block_sums(g, n, std::min(K, n));
  return assemble(K, n, g, log_s);
}

KPlusDistribution induced_kplus_prior(const PriorOnK& prior, const DirichletSchedule& schedule,
                                      int n) {
  if (n < 1) throw std::domain_error("induced_kplus_prior: n must be >= 1");
  int k_max = prior.tail_truncation(1e-12);
  int jmax = std::min(k_max, n);
  KPlusDistribution mix;
  mix.n = n;
  mix.probs.assign(jmax, 0.0);

  // With a static schedule the block sums depend only on gamma, so one
  // convolution table serves every K; the dynamic schedule needs one per K.
  std::vector<double> shared;
  if (schedule.kind == MfmKind::static_mfm)
    shared = log_block_sums(schedule.gamma_at(1), n, jmax);

  std::vector<KahanSum> acc(jmax);
  for (int K = 1; K <= k_max; ++K) {
    double pk = prior.pmf(K);
    if (pk == 0.0) continue;
    double g = schedule.gamma_at(K);
    KPlusDistribution cond =
        schedule.kind == MfmKind::static_mfm
            ? assemble(K, n, g, shared)
            : assemble(K, n, g, log_block_sums(g, n, std::min(K, n)));
    for (int j = 1; j <= cond.max_j(); ++j) acc[j - 1].add(pk * cond.prob(j));
  }
  for (int j = 0; j < jmax; ++j) mix.probs[j] = acc[j].value();
  trim_and_normalise(mix);
  return mix;
}

}  // namespace mfm
