#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mfm {

// log(sum_i exp(v[i])) with max-shift; returns -inf for an empty span or
// when every entry is -inf.
double log_sum_exp(std::span<const double> v);

// log of the binomial coefficient C(n, k); 0 <= k <= n required.
double lchoose(int n, int k);

// Total-variation distance 1/2 * sum_i |p[i] - q[i]|; the shorter vector is
// treated as zero-padded.  Inputs are assumed to be probability vectors.
double tv_distance(std::span<const double> p, std::span<const double> q);

// Compensated (Kahan) accumulator for long sums of small terms.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Shannon entropy -sum p log p in nats; entries <= 0 contribute zero.
double entropy_nats(std::span<const double> p);

// Smallest index of a maximal entry; v must be non-empty.
std::size_t argmax_index(std::span<const double> v);

// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(const std::string& s);

// splitmix64 scrambling step, used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mfm
