#pragma once

#include <vector>

#include "mfm/prior_k.hpp"

namespace mfm {

// Sizes of the non-empty clusters of a partition of n items.
struct ClusterSizes {
  std::vector<int> counts;

  explicit ClusterSizes(std::vector<int> c);
  int k_plus() const { return static_cast<int>(counts.size()); }
  int n() const;
};

// log probability of the unlabeled partition with the given cluster sizes
// under a mixture with K components and symmetric Dirichlet(gamma_K)
// weights, with all component parameters integrated out of the labels:
//   K!/(K-K+)! * Gamma(K g)/Gamma(n+K g) * prod_k Gamma(N_k+g)/Gamma(g).
// Requires K >= K+.
double log_eppf_given_k(const ClusterSizes& sizes, int K, const DirichletSchedule& schedule);

// Distribution of the number of filled clusters K+ on {1, ..., max_j()}.
struct KPlusDistribution {
  std::vector<double> probs;  // probs[j-1] = P(K+ = j)
  int n = 0;                  // sample size the distribution refers to

  int max_j() const { return static_cast<int>(probs.size()); }
  double prob(int j) const;  // zero outside 1..max_j()
  int mode() const;          // smallest j attaining the maximum
  double entropy() const;    // nats
};

// P(K+ = j | K, n) for j = 1..min(K, n): the number of clusters that n
// exchangeable draws from a symmetric Dirichlet(gamma_K) mixture with K
// components occupy.  Computed by a log-scaled convolution over block
// sizes, O(min(K,n) * n^2).
KPlusDistribution kplus_given_k(int K, int n, const DirichletSchedule& schedule);

// Prior of K+ induced by mixing kplus_given_k over p(K), truncating the sum
// at tail_truncation(1e-12).  Trailing probabilities below 1e-15 are
// trimmed and the result renormalised.
KPlusDistribution induced_kplus_prior(const PriorOnK& prior, const DirichletSchedule& schedule,
                                      int n);

}  // namespace mfm
