#include "convbound/discriminator.hpp"

#include <algorithm>
#include <cmath>

#include "convbound/errors.hpp"

namespace convbound {

namespace {

// Band index of count n under thresholds t: 0 below t1, 1 in [t1,t2),
// 2 at or above t2.
int band_of(std::size_t n, const ThresholdConfig& t) {
  const auto count = static_cast<std::int64_t>(n);
  if (count < t.t1) return 0;
  if (count < t.t2) return 1;
  return 2;
}

// Place one anti-diagonal's mass by the edge rule (axes cells).
void place_edge(JointDensity& P, std::size_t k, double mass) {
  if (k == 0) {
    P.at(0, 0) += mass;
  } else {
    P.at(0, k) += 0.5 * mass;
    P.at(k, 0) += 0.5 * mass;
  }
}

// Place one anti-diagonal's mass by the diagonal (interior) rule.
void place_diagonal(JointDensity& P, std::size_t k, double mass) {
  if (k % 2 == 0) {
    P.at(k / 2, k / 2) += mass;
  } else {
    P.at(k / 2, k / 2 + 1) += 0.5 * mass;
    P.at(k / 2 + 1, k / 2) += 0.5 * mass;
  }
}

// Shared frame for both interpretations: the mid band [t1,t2) takes one
// rule, the top band [t2,...] the other, and the sub-t1 band is always
// diagonal (both ions dark, interior placement).
JointDensity interpret(const FrequencyDist& f, const ThresholdConfig& t,
                       bool mid_band_edge) {
  validate(f);
  validate(t);
  const std::size_t n = f.probs.size() - 1;
  JointDensity P = zero_joint(n);
  for (std::size_t k = 0; k <= n; ++k) {
    const double mass = f.probs[k];
    if (mass == 0.0) continue;
    switch (band_of(k, t)) {
      case 0:
        place_diagonal(P, k, mass);
        break;
      case 1:
        if (mid_band_edge) place_edge(P, k, mass);
        else place_diagonal(P, k, mass);
        break;
      default:
        if (mid_band_edge) place_diagonal(P, k, mass);
        else place_edge(P, k, mass);
        break;
    }
  }
  return P;
}

double cdf_below(const FrequencyDist& f, std::int64_t cut) {
  // mass at counts < cut
  double c = 0.0;
  const auto limit = std::min<std::int64_t>(
      cut, static_cast<std::int64_t>(f.probs.size()));
  for (std::int64_t n = 0; n < limit; ++n) {
    c += f.probs[static_cast<std::size_t>(n)];
  }
  return c;
}

}  // namespace

void validate(const ThresholdConfig& t) {
  if (t.t1 <= 0) {
    throw ConfigError("threshold t1 must be positive");
  }
  if (t.t2 <= t.t1) {
    throw ConfigError("threshold t2 must exceed t1");
  }
}

CategoryCounts classify_counts(const FrequencyDist& f,
                               const ThresholdConfig& t) {
  validate(f);
  validate(t);
  CategoryCounts c;
  c.total = static_cast<double>(f.total_experiments);
  for (std::size_t n = 0; n < f.probs.size(); ++n) {
    const double mass = f.probs[n] * c.total;
    switch (band_of(n, t)) {
      case 0: c.n0 += mass; break;
      case 1: c.n1 += mass; break;
      default: c.n2 += mass; break;
    }
  }
  return c;
}

double parity_correlation(const CategoryCounts& c) {
  return (c.n0 + c.n2 - c.n1) / c.total;
}

double flipped_category_correlation(const CategoryCounts& c) {
  return (c.n0 + c.n1 - c.n2) / c.total;
}

JointDensity interpret_rowe(const FrequencyDist& f, const ThresholdConfig& t) {
  return interpret(f, t, /*mid_band_edge=*/true);
}

JointDensity interpret_other(const FrequencyDist& f,
                             const ThresholdConfig& t) {
  return interpret(f, t, /*mid_band_edge=*/false);
}

JointDensity blend_interpretations(const FrequencyDist& f,
                                   const ThresholdConfig& t, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("blend weight must lie in [0,1]");
  }
  JointDensity rowe = interpret_rowe(f, t);
  const JointDensity other = interpret_other(f, t);
  for (std::size_t idx = 0; idx < rowe.p.size(); ++idx) {
    rowe.p[idx] = lambda * rowe.p[idx] + (1.0 - lambda) * other.p[idx];
  }
  return rowe;
}

double pcc(const FrequencyDist& dark, const FrequencyDist& bright,
           double w_dark, std::int64_t cut) {
  validate(dark);
  validate(bright);
  if (!(w_dark >= 0.0 && w_dark <= 1.0)) {
    throw ConfigError("dark-class weight must lie in [0,1]");
  }
  if (cut < 0) {
    throw ConfigError("cut must be non-negative");
  }
  return w_dark * cdf_below(dark, cut) +
         (1.0 - w_dark) * (1.0 - cdf_below(bright, cut));
}

CutResult optimal_cut(const FrequencyDist& dark, const FrequencyDist& bright,
                      double w_dark) {
  const auto max_n = static_cast<std::int64_t>(
      std::max(dark.probs.size(), bright.probs.size()) - 1);
  CutResult best{0, pcc(dark, bright, w_dark, 0)};
  for (std::int64_t cut = 1; cut <= max_n; ++cut) {
    const double value = pcc(dark, bright, w_dark, cut);
    if (value > best.pcc) {
      best = {cut, value};
    }
  }
  return best;
}

}  // namespace convbound
