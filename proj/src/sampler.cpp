#include "mfm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mfm/errors.hpp"
#include "mfm/math_util.hpp"

namespace mfm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}  // namespace

Partition partition_of(std::span<const int> S) {
  Partition p;
  std::vector<int> group_of;  // component label -> group index, -1 if unseen
  for (std::size_t i = 0; i < S.size(); ++i) {
    int lab = S[i];
    if (lab < 0) throw std::invalid_argument("partition_of: negative label");
    if (group_of.size() <= static_cast<std::size_t>(lab))
      group_of.resize(lab + 1, -1);
    if (group_of[lab] < 0) {
      group_of[lab] = p.k_plus();
      p.groups.emplace_back();
      p.counts.push_back(0);
      p.labels.push_back(lab);
    }
    int g = group_of[lab];
    p.groups[g].push_back(static_cast<int>(i));
    ++p.counts[g];
  }
  if (p.groups.empty()) throw std::invalid_argument("partition_of: empty assignment");
  return p;
}

void step1_update_assignments(SamplerState& state, std::span<const double> y, Rng& rng,
                              LikelihoodMode mode) {
  int K = state.K;
  if (mode == LikelihoodMode::flattened) {
    // Density factor dropped: each draw is categorical on the weights alone.
    std::vector<double> cum(K);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      total += state.eta[k];
      cum[k] = total;
    }
    for (std::size_t i = 0; i < y.size(); ++i)
      state.S[i] = rng.categorical_from_cumulative(cum);
    return;
  }
  std::vector<double> base(K), half_inv_var(K), logits(K);
  for (int k = 0; k < K; ++k) {
    base[k] = std::log(state.eta[k]) - 0.5 * (kLogTwoPi + std::log(state.sigma2[k]));
    half_inv_var[k] = 0.5 / state.sigma2[k];
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (int k = 0; k < K; ++k) {
      double d = y[i] - state.mu[k];
      logits[k] = base[k] - d * d * half_inv_var[k];
    }
    try {
      state.S[i] = rng.categorical_from_logits(logits);
    } catch (const std::runtime_error&) {
      throw NumericError("assignment update: all component densities vanished at observation " +
                         std::to_string(i));
    }
  }
}

void step2_update_filled_components(SamplerState& state, const Partition& part,
                                    std::span<const double> y, const ComponentPriors& priors,
                                    Rng& rng) {
  for (int g = 0; g < part.k_plus(); ++g) {
    int lab = part.labels[g];
    int nk = part.counts[g];
    double sse = 0.0, sum = 0.0;
    for (int i : part.groups[g]) {
      double d = y[i] - state.mu[lab];
      sse += d * d;
      sum += y[i];
    }
    // Variance first, about the current mean...
    double prec = rng.gamma(priors.c0 + 0.5 * nk, priors.C0 + 0.5 * sse);
    if (!(prec > 0.0) || !std::isfinite(prec))
      throw NumericError("component update: precision draw left (0, inf)");
    state.sigma2[lab] = 1.0 / prec;
    // ...then the mean given the fresh variance.
    double Bk = 1.0 / (1.0 / priors.B0 + nk * prec);
    double bk = Bk * (priors.b0 / priors.B0 + prec * sum);
    state.mu[lab] = rng.normal(bk, std::sqrt(Bk));
  }
}

void step2_redraw_from_prior(SamplerState& state, const Partition& part,
                             const ComponentPriors& priors, Rng& rng) {
  for (int g = 0; g < part.k_plus(); ++g) {
    int lab = part.labels[g];
    double prec = rng.gamma(priors.c0, priors.C0);
    if (!(prec > 0.0) || !std::isfinite(prec))
      throw NumericError("component update: precision draw left (0, inf)");
    state.sigma2[lab] = 1.0 / prec;
    state.mu[lab] = rng.normal(priors.b0, std::sqrt(priors.B0));
  }
}

namespace {

// Per-chain constants of the K update: the truncation point and the prior
// log-pmf table.
struct Step3Context {
  const PriorOnK* prior;
  DirichletSchedule schedule;
  int cap;
  std::vector<double> log_prior;  // index K = 1..cap
};

Step3Context make_step3_context(const PriorOnK& prior, const DirichletSchedule& schedule) {
  Step3Context ctx{&prior, schedule, prior.tail_truncation(1e-12), {}};
  ctx.log_prior.assign(ctx.cap + 1, kNegInf);
  for (int K = 1; K <= ctx.cap; ++K) ctx.log_prior[K] = prior.log_pmf(K);
  return ctx;
}

int sample_K(const Step3Context& ctx, const ClusterSizes& sizes, Rng& rng) {
  int kp = sizes.k_plus();
  int hi = std::max(ctx.cap, kp);
  std::vector<double> logw(hi - kp + 1);
  auto prior_at = [&](int K) {
    return K <= ctx.cap ? ctx.log_prior[K] : ctx.prior->log_pmf(K);
  };
  if (ctx.schedule.kind == MfmKind::static_mfm) {
    // gamma does not vary with K, so the per-cluster Gamma terms of the
    // partition probability can be hoisted out of the candidate loop.
    double g = ctx.schedule.value;
    double n = sizes.n();
    double base = -kp * std::lgamma(g);
    for (int nk : sizes.counts) base += std::lgamma(nk + g);
    for (int K = kp; K <= hi; ++K)
      logw[K - kp] = prior_at(K) + std::lgamma(K + 1.0) - std::lgamma(K - kp + 1.0) +
                     std::lgamma(K * g) - std::lgamma(n + K * g) + base;
  } else {
    for (int K = kp; K <= hi; ++K)
      logw[K - kp] = prior_at(K) + log_eppf_given_k(sizes, K, ctx.schedule);
  }
  try {
    return kp + rng.categorical_from_logits(logw);
  } catch (const std::runtime_error&) {
    throw NumericError("K update: no candidate K has positive probability (K+ = " +
                       std::to_string(kp) + ")");
  }
}

}  // namespace

int step3_update_K(const Partition& part, const PriorOnK& prior,
                   const DirichletSchedule& schedule, Rng& rng) {
  Step3Context ctx = make_step3_context(prior, schedule);
  return sample_K(ctx, part.sizes(), rng);
}

void step4_relabel_and_add_empties(SamplerState& state, const Partition& part, int new_K,
                                   const ComponentPriors& priors, Rng& rng) {
  int kp = part.k_plus();
  if (new_K < kp) throw std::domain_error("step 4: new K must be >= K+");
  SamplerState out;
  out.K = new_K;
  out.eta.reserve(new_K);
  out.mu.reserve(new_K);
  out.sigma2.reserve(new_K);
  for (int g = 0; g < kp; ++g) {
    int lab = part.labels[g];
    out.eta.push_back(state.eta[lab]);
    out.mu.push_back(state.mu[lab]);
    out.sigma2.push_back(state.sigma2[lab]);
  }
  out.S.assign(state.S.size(), 0);
  for (int g = 0; g < kp; ++g)
    for (int i : part.groups[g]) out.S[i] = g;
  for (int k = kp; k < new_K; ++k) {
    double prec = rng.gamma(priors.c0, priors.C0);
    if (!(prec > 0.0) || !std::isfinite(prec))
      throw NumericError("component update: precision draw left (0, inf)");
    out.sigma2.push_back(1.0 / prec);
    out.mu.push_back(rng.normal(priors.b0, std::sqrt(priors.B0)));
    // Placeholder weight; step 5 redraws eta immediately.  Strictly positive
    // so the state stays valid in between.
    out.eta.push_back(std::numeric_limits<double>::min());
  }
  double total = 0.0;
  for (double w : out.eta) total += w;
  for (double& w : out.eta) w /= total;
  state = std::move(out);
}

void step5_update_weights(SamplerState& state, const std::vector<int>& counts,
                          const DirichletSchedule& schedule, Rng& rng) {
  if (static_cast<int>(counts.size()) > state.K)
    throw std::invalid_argument("step 5: more filled groups than components");
  double g = schedule.gamma_at(state.K);
  std::vector<double> conc(state.K, g);
  for (std::size_t k = 0; k < counts.size(); ++k) conc[k] += counts[k];
  state.eta = rng.dirichlet(conc);
}

SamplerState init_state(std::span<const double> y, const ComponentPriors& priors,
                        int init_components) {
  if (init_components < 1) throw std::domain_error("init_state: need >= 1 components");
  if (y.empty()) throw std::invalid_argument("init_state: no observations");
  int n = static_cast<int>(y.size());
  int m = init_components;

  // One-dimensional k-means, seeded at equally spaced quantiles of the
  // (ascending) data.
  std::vector<double> centroid(m);
  for (int j = 0; j < m; ++j) {
    double q = (2.0 * j + 1.0) / (2.0 * m);
    centroid[j] = y[static_cast<int>(std::lround(q * (n - 1)))];
  }
  std::vector<int> assign(n, -1);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::fabs(y[i] - centroid[0]);
      for (int k = 1; k < m; ++k) {
        double d = std::fabs(y[i] - centroid[k]);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<double> sum(m, 0.0);
    std::vector<int> cnt(m, 0);
    for (int i = 0; i < n; ++i) {
      sum[assign[i]] += y[i];
      ++cnt[assign[i]];
    }
    for (int k = 0; k < m; ++k)
      if (cnt[k] > 0) centroid[k] = sum[k] / cnt[k];
  }

  SamplerState state;
  state.K = m;
  state.eta.assign(m, 1.0 / m);
  state.mu = centroid;
  state.sigma2.assign(m, priors.C0 / 2.0);
  state.S = assign;
  return state;
}

namespace {

void validate_protocol(const ChainProtocol& p) {
  if (p.iterations < 1) throw ConfigError("protocol: iterations must be >= 1");
  if (p.burn_in < 0) throw ConfigError("protocol: burn_in must be >= 0");
  if (p.thinning < 1) throw ConfigError("protocol: thinning must be >= 1");
  if (p.init_components < 1) throw ConfigError("protocol: init_components must be >= 1");
}

std::vector<std::pair<std::string, std::string>> build_meta(const MfmSetting& setting,
                                                            const ComponentPriors& priors,
                                                            const ChainProtocol& protocol,
                                                            LikelihoodMode mode, int n) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("setting_id", setting.setting_id());
  meta.emplace_back("prior_k", setting.prior_k.str());
  meta.emplace_back("mfm_kind", to_string(setting.schedule.kind));
  meta.emplace_back("gamma_or_alpha", format_number(setting.schedule.value));
  meta.emplace_back("B0", format_number(setting.B0));
  meta.emplace_back("C0", format_number(setting.C0));
  meta.emplace_back("b0", setting.b0 ? format_number(*setting.b0) : "midpoint");
  meta.emplace_back("b0_resolved", format_number(priors.b0));
  meta.emplace_back("c0", format_number(setting.c0));
  meta.emplace_back("n", std::to_string(n));
  meta.emplace_back("iterations", std::to_string(protocol.iterations));
  meta.emplace_back("burn_in", std::to_string(protocol.burn_in));
  meta.emplace_back("thinning", std::to_string(protocol.thinning));
  meta.emplace_back("seed", std::to_string(protocol.seed));
  meta.emplace_back("init_components", std::to_string(protocol.init_components));
  meta.emplace_back("likelihood",
                    mode == LikelihoodMode::normal ? "normal" : "flattened");
  return meta;
}

}  // namespace

ChainTrace run_chain(const Dataset& data, const MfmSetting& setting,
                     const ChainProtocol& protocol, LikelihoodMode mode) {
  validate_protocol(protocol);
  ComponentPriors priors = resolve_component_priors(setting, data);
  Rng rng(protocol.seed);
  SamplerState state = init_state(data.values, priors, protocol.init_components);
  Step3Context ctx = make_step3_context(setting.prior_k, setting.schedule);

  ChainTrace trace;
  trace.meta = build_meta(setting, priors, protocol, mode, data.n());
  trace.K.reserve(protocol.iterations / protocol.thinning + 1);
  trace.k_plus.reserve(protocol.iterations / protocol.thinning + 1);

  std::int64_t total = protocol.burn_in + protocol.iterations;
  for (std::int64_t t = 1; t <= total; ++t) {
    step1_update_assignments(state, data.values, rng, mode);
    Partition part = partition_of(state.S);
    if (mode == LikelihoodMode::normal)
      step2_update_filled_components(state, part, data.values, priors, rng);
    else
      step2_redraw_from_prior(state, part, priors, rng);
    int new_K = sample_K(ctx, part.sizes(), rng);
    step4_relabel_and_add_empties(state, part, new_K, priors, rng);
    step5_update_weights(state, part.counts, setting.schedule, rng);
    if (t > protocol.burn_in && (t - protocol.burn_in) % protocol.thinning == 0) {
      trace.K.push_back(state.K);
      trace.k_plus.push_back(part.k_plus());
    }
  }
  return trace;
}

}  // namespace mfm
