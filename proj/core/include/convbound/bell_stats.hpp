#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "convbound/histogram.hpp"

namespace convbound {

// Analyzer settings attached to a report. Metadata only: nothing is computed
// from the angles, they label which experimental run a histogram came from.
struct SettingPair {
  double phi1 = 0.0;
  double phi2 = 0.0;
  std::string label;
};

// Per-constructor correlations for one histogram plus their envelope.
// per_constructor preserves evaluation order for stable output.
struct CorrelationReport {
  SettingPair setting;
  std::vector<std::pair<std::string, double>> per_constructor;
  double min_r = 0.0;
  double max_r = 0.0;
};

// Evaluates pearson_correlation over the constructor family: edge, diagonal,
// uniform, random(seed) for each seed, and the extremal asymmetric form of
// uniform. Degenerate f propagates DegenerateDistributionError.
CorrelationReport correlation_bounds(const FrequencyDist& f,
                                     const SettingPair& setting,
                                     const std::vector<std::uint64_t>& seeds);

// B = q11 + q12 + q21 - q22. The caller chooses which setting pair occupies
// the minus slot. Throws ValidationError if any q is outside [-1, 1].
double chsh(double q11, double q12, double q21, double q22);

// Divide every count by the global maximum over both coordinates and all
// samples, mapping the data into [0,1]^2. All-zero input stays all-zero.
// Throws ValidationError on empty input.
std::vector<std::pair<double, double>> normalized_counts(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& samples);

}  // namespace convbound
