#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "convbound/histogram.hpp"

namespace convbound {

// Joint density over two emitters' photon counts. Row index i = ion-1 count
// (random variable A), column index j = ion-2 count (B). Dense row-major
// (n+1) x (n+1); entries are probabilities summing to 1.
struct JointDensity {
  std::vector<double> p;
  std::size_t n = 0;  // maximum count; matrix side is n + 1

  std::size_t side() const { return n + 1; }
  double& at(std::size_t i, std::size_t j) { return p[i * (n + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return p[i * (n + 1) + j]; }
};

// Symmetric/antisymmetric decomposition P = S + A. A carries signed entries;
// non-negativity of P is equivalent to -S <= A <= S entrywise.
struct SymAntisymPair {
  std::vector<double> s;
  std::vector<double> a;
  std::size_t n = 0;
};

// Throws ValidationError unless entries are >= 0, finite, and sum to 1
// within kNormalizationTol.
void validate(const JointDensity& P);

// All-zero matrix of the right shape for a distribution over 0..n.
JointDensity zero_joint(std::size_t n);

// f[k] = sum over the anti-diagonal i + j = k. Trailing zero bins are
// trimmed so the result ends at its last nonzero count.
FrequencyDist antidiagonal_convolve(const JointDensity& P);

// Row sums / column sums, trimmed to the last nonzero count.
FrequencyDist marginal_ion1(const JointDensity& P);
FrequencyDist marginal_ion2(const JointDensity& P);

// Anti-diagonal mass on the axes: P_{ij} = f_{i+j}/2 * (delta_{i0} + delta_{j0}).
JointDensity construct_edge(const FrequencyDist& f);

// Anti-diagonal mass on (or adjacent to) the main diagonal: even totals at
// (n/2, n/2), odd totals split between ((n-1)/2,(n+1)/2) and its transpose.
JointDensity construct_diagonal(const FrequencyDist& f);

// Each anti-diagonal's mass spread uniformly: P_{ij} = f_{i+j}/(1+i+j).
JointDensity construct_uniform(const FrequencyDist& f);

// P_{ij} = f_{i+j} * M_{ij} / M*_{i+j} where M has i.i.d. uniform(0,1)
// entries drawn row-major from a seeded engine and M*_k is the anti-diagonal
// sum of M. Same seed, same result, on every platform.
JointDensity construct_random(const FrequencyDist& f, std::uint64_t seed);

// The same renormalization applied to a caller-supplied weight matrix
// (row-major, side len(f)). M == all-ones reproduces construct_uniform.
// An anti-diagonal of M summing to ~0 falls back to uniform spreading.
JointDensity construct_random_from_matrix(const FrequencyDist& f,
                                          const std::vector<double>& m);

// Outer product P_{ij} = g_i * h_j, padded square to max support.
JointDensity construct_independent(const FrequencyDist& g,
                                   const FrequencyDist& h);

// s = (P + P^T)/2, a = (P - P^T)/2.
SymAntisymPair sym_antisym_split(const JointDensity& P);

// Maximal marginal separation consistent with the symmetrized density:
// lower triangle doubled, diagonal kept, upper triangle zeroed. Preserves
// the anti-diagonal convolution of S.
JointDensity extremal_asymmetric(const JointDensity& P);

// Pearson product-moment correlation of the count variables A and B.
// Throws DegenerateDistributionError when either marginal variance is zero.
double pearson_correlation(const JointDensity& P);

// L1 distance between the two marginals; 0 iff they are equal.
double marginal_difference(const JointDensity& P);

}  // namespace convbound
