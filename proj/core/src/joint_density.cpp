#include "convbound/joint_density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "convbound/errors.hpp"
#include "convbound/rng.hpp"

namespace convbound {

namespace {

// Trim to the last nonzero entry, keeping at least index 0.
void trim_trailing_zeros(std::vector<double>& v) {
  std::size_t last = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) last = i;
  }
  v.resize(last + 1);
}

}  // namespace

void validate(const JointDensity& P) {
  if (P.p.size() != P.side() * P.side()) {
    throw ValidationError("joint density storage does not match its size");
  }
  double sum = 0.0;
  for (double x : P.p) {
    if (!std::isfinite(x)) {
      throw ValidationError("joint density has a non-finite entry");
    }
    if (x < 0.0) {
      throw ValidationError("joint density has a negative entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kNormalizationTol) {
    throw ValidationError("joint density does not sum to 1");
  }
}

JointDensity zero_joint(std::size_t n) {
  JointDensity P;
  P.n = n;
  P.p.assign((n + 1) * (n + 1), 0.0);
  return P;
}

FrequencyDist antidiagonal_convolve(const JointDensity& P) {
  validate(P);
  const std::size_t side = P.side();
  std::vector<double> f(2 * P.n + 1, 0.0);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      f[i + j] += P.at(i, j);
    }
  }
  trim_trailing_zeros(f);
  FrequencyDist out;
  out.probs = std::move(f);
  out.total_experiments = 1;
  return out;
}

FrequencyDist marginal_ion1(const JointDensity& P) {
  validate(P);
  const std::size_t side = P.side();
  std::vector<double> m(side, 0.0);
  for (std::size_t i = 0; i < side; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < side; ++j) row += P.at(i, j);
    m[i] = row;
  }
  trim_trailing_zeros(m);
  return {std::move(m), 1};
}

FrequencyDist marginal_ion2(const JointDensity& P) {
  validate(P);
  const std::size_t side = P.side();
  std::vector<double> m(side, 0.0);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) m[j] += P.at(i, j);
  }
  trim_trailing_zeros(m);
  return {std::move(m), 1};
}

JointDensity construct_edge(const FrequencyDist& f) {
  validate(f);
  const std::size_t n = f.probs.size() - 1;
  JointDensity P = zero_joint(n);
  P.at(0, 0) = f.probs[0];
  for (std::size_t k = 1; k <= n; ++k) {
    P.at(0, k) += 0.5 * f.probs[k];
    P.at(k, 0) += 0.5 * f.probs[k];
  }
  return P;
}

JointDensity construct_diagonal(const FrequencyDist& f) {
  validate(f);
  const std::size_t n = f.probs.size() - 1;
  JointDensity P = zero_joint(n);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k % 2 == 0) {
      P.at(k / 2, k / 2) += f.probs[k];
    } else {
      P.at(k / 2, k / 2 + 1) += 0.5 * f.probs[k];
      P.at(k / 2 + 1, k / 2) += 0.5 * f.probs[k];
    }
  }
  return P;
}

JointDensity construct_uniform(const FrequencyDist& f) {
  validate(f);
  const std::size_t n = f.probs.size() - 1;
  JointDensity P = zero_joint(n);
  for (std::size_t k = 0; k <= n; ++k) {
    const double cell = f.probs[k] / static_cast<double>(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
      P.at(i, k - i) = cell;
    }
  }
  return P;
}

JointDensity construct_random_from_matrix(const FrequencyDist& f,
                                          const std::vector<double>& m) {
  validate(f);
  const std::size_t side = f.probs.size();
  const std::size_t n = side - 1;
  if (m.size() != side * side) {
    throw ValidationError("weight matrix shape does not match f");
  }
  JointDensity P = zero_joint(n);
  for (std::size_t k = 0; k <= n; ++k) {
    double diag_sum = 0.0;
    for (std::size_t i = 0; i <= k; ++i) diag_sum += m[i * side + (k - i)];
    if (diag_sum > 0.0) {
      const double scale = f.probs[k] / diag_sum;
      for (std::size_t i = 0; i <= k; ++i) {
        P.at(i, k - i) = m[i * side + (k - i)] * scale;
      }
    } else {
      // vanishing anti-diagonal weight: spread uniformly instead
      const double cell = f.probs[k] / static_cast<double>(k + 1);
      for (std::size_t i = 0; i <= k; ++i) P.at(i, k - i) = cell;
    }
  }
  return P;
}

JointDensity construct_random(const FrequencyDist& f, std::uint64_t seed) {
  validate(f);
  const std::size_t side = f.probs.size();
  rng::Engine engine(rng::derive_seed(seed, 0x9D2C5680u));
  std::vector<double> m(side * side);
  for (double& cell : m) cell = engine.uniform01();
  return construct_random_from_matrix(f, m);
}

JointDensity construct_independent(const FrequencyDist& g,
                                   const FrequencyDist& h) {
  validate(g);
  validate(h);
  const std::size_t side = std::max(g.probs.size(), h.probs.size());
  JointDensity P = zero_joint(side - 1);
  for (std::size_t i = 0; i < g.probs.size(); ++i) {
    for (std::size_t j = 0; j < h.probs.size(); ++j) {
      P.at(i, j) = g.probs[i] * h.probs[j];
    }
  }
  return P;
}

SymAntisymPair sym_antisym_split(const JointDensity& P) {
  validate(P);
  const std::size_t side = P.side();
  SymAntisymPair pair;
  pair.n = P.n;
  pair.s.resize(side * side);
  pair.a.resize(side * side);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double x = P.at(i, j);
      const double xt = P.at(j, i);
      pair.s[i * side + j] = 0.5 * (x + xt);
      pair.a[i * side + j] = 0.5 * (x - xt);
    }
  }
  return pair;
}

JointDensity extremal_asymmetric(const JointDensity& P) {
  validate(P);
  const std::size_t side = P.side();
  JointDensity out = zero_joint(P.n);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      out.at(i, j) = P.at(i, j) + P.at(j, i);  // 2 * S_ij
    }
    out.at(i, i) = P.at(i, i);  // S_ii; upper triangle stays zero
  }
  return out;
}

double pearson_correlation(const JointDensity& P) {
  validate(P);
  const std::size_t side = P.side();
  double mean_a = 0.0, mean_b = 0.0, sec_a = 0.0, sec_b = 0.0, eab = 0.0;
  for (std::size_t i = 0; i < side; ++i) {
    const double x = static_cast<double>(i);
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < side; ++j) {
      row += P.at(i, j);
      col += P.at(j, i);
      eab += x * static_cast<double>(j) * P.at(i, j);
    }
    mean_a += x * row;
    sec_a += x * x * row;
    mean_b += x * col;
    sec_b += x * x * col;
  }
  const double var_a = sec_a - mean_a * mean_a;
  const double var_b = sec_b - mean_b * mean_b;
  if (var_a <= 0.0 || var_b <= 0.0) {
    throw DegenerateDistributionError(
        "correlation undefined: a marginal has zero variance");
  }
  const double r = (eab - mean_a * mean_b) / std::sqrt(var_a * var_b);
  return std::clamp(r, -1.0, 1.0);
}

double marginal_difference(const JointDensity& P) {
  const FrequencyDist m1 = marginal_ion1(P);
  const FrequencyDist m2 = marginal_ion2(P);
  const std::size_t len = std::max(m1.probs.size(), m2.probs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double a = i < m1.probs.size() ? m1.probs[i] : 0.0;
    const double b = i < m2.probs.size() ? m2.probs[i] : 0.0;
    d += std::abs(a - b);
  }
  return d;
}

}  // namespace convbound
