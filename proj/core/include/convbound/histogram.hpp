#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace convbound {

// Distributions must sum to 1 within this tolerance.
inline constexpr double kNormalizationTol = 1e-12;

// Raw photon-count histogram. bins[n] = number of experiments that recorded
// exactly n summed counts. Canonical form: last bin nonzero, so
// bins.size() - 1 is the maximum observed count N.
struct Histogram {
  std::vector<std::uint64_t> bins;
  std::string label;
};

// Normalized count distribution f over 0..N. total_experiments carries the
// source sample size so downstream category counts can be reported in
// experiment units; it is 1 for densities that never were counts.
struct FrequencyDist {
  std::vector<double> probs;
  std::uint64_t total_experiments = 1;
};

// Throws ValidationError unless: nonempty, at least one bin > 0, last bin > 0.
void validate(const Histogram& h);

// Throws ValidationError unless: nonempty, all entries finite and >= 0,
// sum within kNormalizationTol of 1, total_experiments >= 1.
void validate(const FrequencyDist& f);

// f_n = bins[n] / sum(bins). total_experiments = sum(bins).
FrequencyDist normalize(const Histogram& h);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// mean = sum n*f_n, variance = sum n^2*f_n - mean^2 (clamped at 0).
Moments empirical_stats(const FrequencyDist& f);

// Validating constructor for literal prob vectors (tests, synthetic inputs).
FrequencyDist make_frequency(std::vector<double> probs,
                             std::uint64_t total_experiments = 1);

}  // namespace convbound
