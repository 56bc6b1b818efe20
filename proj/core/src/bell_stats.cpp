#include "convbound/bell_stats.hpp"

#include <algorithm>
#include <cmath>

#include "convbound/errors.hpp"
#include "convbound/joint_density.hpp"

namespace convbound {

CorrelationReport correlation_bounds(const FrequencyDist& f,
                                     const SettingPair& setting,
                                     const std::vector<std::uint64_t>& seeds) {
  validate(f);
  CorrelationReport report;
  report.setting = setting;
  auto add = [&report](const std::string& name, const JointDensity& P) {
    report.per_constructor.emplace_back(name, pearson_correlation(P));
  };
  add("edge", construct_edge(f));
  add("diagonal", construct_diagonal(f));
  const JointDensity uniform = construct_uniform(f);
  add("uniform", uniform);
  for (std::uint64_t seed : seeds) {
    add("random_" + std::to_string(seed), construct_random(f, seed));
  }
  add("extremal", extremal_asymmetric(uniform));

  report.min_r = report.per_constructor.front().second;
  report.max_r = report.min_r;
  for (const auto& [name, r] : report.per_constructor) {
    report.min_r = std::min(report.min_r, r);
    report.max_r = std::max(report.max_r, r);
  }
  return report;
}

double chsh(double q11, double q12, double q21, double q22) {
  for (double q : {q11, q12, q21, q22}) {
    if (!(q >= -1.0 && q <= 1.0)) {
      throw ValidationError("setting correlation outside [-1,1]");
    }
  }
  return q11 + q12 + q21 - q22;
}

std::vector<std::pair<double, double>> normalized_counts(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& samples) {
  if (samples.empty()) {
    throw ValidationError("no samples to normalize");
  }
  std::uint64_t max_count = 0;
  for (const auto& [a, b] : samples) {
    max_count = std::max({max_count, a, b});
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(samples.size());
  if (max_count == 0) {
    out.assign(samples.size(), {0.0, 0.0});
    return out;
  }
  const double denom = static_cast<double>(max_count);
  for (const auto& [a, b] : samples) {
    out.emplace_back(static_cast<double>(a) / denom,
                     static_cast<double>(b) / denom);
  }
  return out;
}

}  // namespace convbound
