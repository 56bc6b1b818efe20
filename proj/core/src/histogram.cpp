#include "convbound/histogram.hpp"

#include <cmath>
#include <utility>

#include "convbound/errors.hpp"

namespace convbound {

void validate(const Histogram& h) {
  if (h.bins.empty()) {
    throw ValidationError("histogram has no bins");
  }
  bool any = false;
  for (auto b : h.bins) {
    if (b > 0) {
      any = true;
      break;
    }
  }
  if (!any) {
    throw ValidationError("histogram is all zero");
  }
  if (h.bins.back() == 0) {
    throw ValidationError("histogram has trailing zero bins; trim to the "
                          "last nonzero count");
  }
}

void validate(const FrequencyDist& f) {
  if (f.probs.empty()) {
    throw ValidationError("frequency distribution has no entries");
  }
  if (f.total_experiments < 1) {
    throw ValidationError("total_experiments must be >= 1");
  }
  double sum = 0.0;
  for (double p : f.probs) {
    if (!std::isfinite(p)) {
      throw ValidationError("frequency distribution has a non-finite entry");
    }
    if (p < 0.0) {
      throw ValidationError("frequency distribution has a negative entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTol) {
    throw ValidationError("frequency distribution does not sum to 1");
  }
}

FrequencyDist normalize(const Histogram& h) {
  validate(h);
  std::uint64_t total = 0;
  for (auto b : h.bins) total += b;
  FrequencyDist f;
  f.total_experiments = total;
  f.probs.resize(h.bins.size());
  const double denom = static_cast<double>(total);
  for (std::size_t n = 0; n < h.bins.size(); ++n) {
    f.probs[n] = static_cast<double>(h.bins[n]) / denom;
  }
  return f;
}

Moments empirical_stats(const FrequencyDist& f) {
  validate(f);
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t n = 0; n < f.probs.size(); ++n) {
    const double x = static_cast<double>(n);
    mean += x * f.probs[n];
    second += x * x * f.probs[n];
  }
  double variance = second - mean * mean;
  if (variance < 0.0) variance = 0.0;  // cancellation guard
  return {mean, variance};
}

FrequencyDist make_frequency(std::vector<double> probs,
                             std::uint64_t total_experiments) {
  FrequencyDist f{std::move(probs), total_experiments};
  validate(f);
  return f;
}

}  // namespace convbound
