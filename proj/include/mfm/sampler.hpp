#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfm/partition_prior.hpp"
#include "mfm/rng.hpp"
#include "mfm/setting.hpp"

namespace mfm {

// Full conditional sampler state: K components with weights eta (strictly
// positive, summing to one), means mu, variances sigma2, and assignments
// S[i] in 0..K-1.
struct SamplerState {
  int K = 0;
  std::vector<double> eta, mu, sigma2;
  std::vector<int> S;
};

// The filled clusters of an assignment vector.  Groups are ordered by their
// smallest member index; labels[g] is the component the group currently
// occupies.
struct Partition {
  std::vector<std::vector<int>> groups;
  std::vector<int> counts;
  std::vector<int> labels;

  int k_plus() const { return static_cast<int>(groups.size()); }
  ClusterSizes sizes() const { return ClusterSizes(counts); }
};

Partition partition_of(std::span<const int> S);

// With the normal likelihood each observation is assigned proportionally to
// eta_k N(y_i | mu_k, sigma2_k); in flattened mode the density factor is
// dropped (assignment proportional to eta alone), which turns the chain
// into a sampler of the prior.
enum class LikelihoodMode { normal, flattened };

// Step 1: redraw all assignments from their full conditionals.
void step1_update_assignments(SamplerState& state, std::span<const double> y, Rng& rng,
                              LikelihoodMode mode = LikelihoodMode::normal);

// Step 2: conjugate update of the filled components' (sigma2, mu): first
// sigma_k^-2 ~ Gamma(c0 + N_k/2, C0 + sse_k/2) about the current mean, then
// mu_k ~ N(b_k, B_k) given the new variance.
void step2_update_filled_components(SamplerState& state, const Partition& part,
                                    std::span<const double> y, const ComponentPriors& priors,
                                    Rng& rng);

// Flattened-mode counterpart: filled components are redrawn from the prior.
void step2_redraw_from_prior(SamplerState& state, const Partition& part,
                             const ComponentPriors& priors, Rng& rng);

// Step 3: redraw K from p(K | partition) over K = K+, K+ + 1, ...,
// truncated at the prior's 1e-12 tail.
int step3_update_K(const Partition& part, const PriorOnK& prior,
                   const DirichletSchedule& schedule, Rng& rng);

// Step 4: relabel the filled components to 1..K+ (ordered by smallest
// member) and append new_K - K+ empty components drawn from the prior.
void step4_relabel_and_add_empties(SamplerState& state, const Partition& part, int new_K,
                                   const ComponentPriors& priors, Rng& rng);

// Step 5: redraw the weights eta ~ Dirichlet(gamma_K + N_1, ..., gamma_K +
// N_{K+}, gamma_K, ..., gamma_K); counts must be the relabeled group sizes.
void step5_update_weights(SamplerState& state, const std::vector<int>& counts,
                          const DirichletSchedule& schedule, Rng& rng);

// Deterministic initial state: init_components components with equal
// weights, variances C0/2, and means from a one-dimensional k-means pass
// seeded at equally spaced quantiles; assignments go to the nearest mean.
SamplerState init_state(std::span<const double> y, const ComponentPriors& priors,
                        int init_components);

struct ChainProtocol {
  std::int64_t iterations = 20000;  // recorded-phase sweeps (before thinning)
  std::int64_t burn_in = 5000;
  int thinning = 4;
  std::uint64_t seed = 1;
  int init_components = 10;
};

// Thinned draws of (K, K+) plus the metadata echoed into trace files.
struct ChainTrace {
  std::vector<int> K;
  std::vector<int> k_plus;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t draws() const { return K.size(); }
};

// Runs burn_in + iterations sweeps of steps 1-5 and records (K, K+) every
// thinning-th sweep after burn-in.
ChainTrace run_chain(const Dataset& data, const MfmSetting& setting,
                     const ChainProtocol& protocol,
                     LikelihoodMode mode = LikelihoodMode::normal);

}  // namespace mfm
