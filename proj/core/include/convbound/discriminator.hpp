#pragma once

#include <cstdint>

#include "convbound/histogram.hpp"
#include "convbound/joint_density.hpp"

namespace convbound {

// Count thresholds partitioning a histogram into zero/one/two-bright bands:
// [0, t1), [t1, t2), [t2, ...]. The boundary count itself belongs to the
// upper band.
struct ThresholdConfig {
  std::int64_t t1 = 25;
  std::int64_t t2 = 86;
};

// Throws ConfigError unless 0 < t1 < t2. Bands beyond a distribution's
// support are legal and simply hold zero mass.
void validate(const ThresholdConfig& t);

// Band masses in experiment units. Fractional values are deliberate: the
// same type serves exact densities (total = 1) and real count data.
struct CategoryCounts {
  double n0 = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
  double total = 0.0;
};

CategoryCounts classify_counts(const FrequencyDist& f,
                               const ThresholdConfig& t);

// q = (n0 + n2 - n1) / total: same-state mass minus different-state mass
// under the band labels zero/one/two bright.
double parity_correlation(const CategoryCounts& c);

// q' = (n0 + n1 - n2) / total: the mid and top bands relabeled as two-bright
// and one-bright respectively.
double flipped_category_correlation(const CategoryCounts& c);

// Band placement: mid band [t1,t2) on the axes (one bright ion), top band
// at the interior diagonal (both bright), sub-t1 band diagonal (both dark).
JointDensity interpret_rowe(const FrequencyDist& f, const ThresholdConfig& t);

// The opposite reading: mid band diagonal, top band on the axes, sub-t1
// band diagonal.
JointDensity interpret_other(const FrequencyDist& f, const ThresholdConfig& t);

// lambda * interpret_rowe + (1 - lambda) * interpret_other, entrywise.
// Throws ConfigError for lambda outside [0,1].
JointDensity blend_interpretations(const FrequencyDist& f,
                                   const ThresholdConfig& t, double lambda);

// Probability of correct classification with a hard cut: dark counted
// correct below `cut`, bright at or above it.
// pcc = w_dark * CDF_dark(cut-1) + (1 - w_dark) * (1 - CDF_bright(cut-1)).
// Throws ConfigError for w_dark outside [0,1] or cut < 0.
double pcc(const FrequencyDist& dark, const FrequencyDist& bright,
           double w_dark, std::int64_t cut);

struct CutResult {
  std::int64_t cut = 0;
  double pcc = 0.0;
};

// Exhaustive scan over 0..max support; ties go to the smallest cut.
CutResult optimal_cut(const FrequencyDist& dark, const FrequencyDist& bright,
                      double w_dark);

}  // namespace convbound
