#include "convbound/synth.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "convbound/errors.hpp"
#include "convbound/rng.hpp"

namespace convbound {

namespace {

// Experiments per deterministic shard. Each shard has its own engine, so
// output never depends on how shards are distributed over threads.
constexpr std::uint64_t kShardSize = 1024;

void simulate_shard(const ExperimentConfig& cfg, std::uint64_t shard,
                    std::pair<std::uint32_t, std::uint32_t>* out,
                    std::uint64_t count) {
  rng::Engine engine(rng::derive_seed(cfg.seed, shard));
  const double w0 = cfg.class_weights[0];
  const double w01 = w0 + cfg.class_weights[1];
  for (std::uint64_t e = 0; e < count; ++e) {
    const double u = engine.uniform01();
    double lambda_a, lambda_b;
    if (u < w0) {
      lambda_a = cfg.lambda_dark;
      lambda_b = cfg.lambda_dark;
    } else if (u < w01) {
      // one bright: which ion is bright is itself a coin flip
      if (engine.uniform01() < 0.5) {
        lambda_a = cfg.lambda_bright;
        lambda_b = cfg.lambda_dark;
      } else {
        lambda_a = cfg.lambda_dark;
        lambda_b = cfg.lambda_bright;
      }
    } else {
      lambda_a = cfg.lambda_bright;
      lambda_b = cfg.lambda_bright;
    }
    const std::uint32_t a = engine.poisson(lambda_a);
    const std::uint32_t b = engine.poisson(lambda_b);
    out[e] = {a, b};
  }
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_experiments < 1) {
    throw ConfigError("n_experiments must be >= 1");
  }
  if (!(cfg.lambda_dark > 0.0)) {
    throw ConfigError("lambda_dark must be positive");
  }
  if (!(cfg.lambda_dark < cfg.lambda_bright)) {
    throw ConfigError("lambda_dark must be below lambda_bright");
  }
  double sum = 0.0;
  for (double w : cfg.class_weights) {
    if (!(w >= 0.0)) {
      throw ConfigError("class weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ConfigError("class weights must sum to 1");
  }
}

JointSamples simulate_pairs(const ExperimentConfig& cfg, unsigned threads) {
  validate(cfg);
  JointSamples result;
  result.pairs.resize(cfg.n_experiments);
  const std::uint64_t n_shards = (cfg.n_experiments + kShardSize - 1) / kShardSize;

  auto run_range = [&](std::uint64_t first_shard, std::uint64_t last_shard) {
    for (std::uint64_t s = first_shard; s < last_shard; ++s) {
      const std::uint64_t begin = s * kShardSize;
      const std::uint64_t count =
          std::min(kShardSize, cfg.n_experiments - begin);
      simulate_shard(cfg, s, result.pairs.data() + begin, count);
    }
  };

  if (threads <= 1 || n_shards <= 1) {
    run_range(0, n_shards);
    return result;
  }

  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::uint64_t>(threads, n_shards));
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  const std::uint64_t per_worker = (n_shards + n_workers - 1) / n_workers;
  for (unsigned w = 0; w < n_workers; ++w) {
    const std::uint64_t first = w * per_worker;
    const std::uint64_t last = std::min(n_shards, first + per_worker);
    if (first >= last) break;
    workers.emplace_back(run_range, first, last);
  }
  for (auto& worker : workers) worker.join();
  return result;
}

Histogram to_histogram(const JointSamples& samples, const std::string& label) {
  if (samples.pairs.empty()) {
    throw ValidationError("no samples to bin");
  }
  std::uint32_t max_sum = 0;
  for (const auto& [a, b] : samples.pairs) {
    max_sum = std::max(max_sum, a + b);
  }
  Histogram h;
  h.label = label;
  h.bins.assign(max_sum + 1, 0);
  for (const auto& [a, b] : samples.pairs) {
    ++h.bins[a + b];
  }
  return h;
}

Histogram simulate_histogram(const ExperimentConfig& cfg, unsigned threads) {
  return to_histogram(simulate_pairs(cfg, threads), "synth");
}

JointDensity empirical_joint(const JointSamples& samples) {
  if (samples.pairs.empty()) {
    throw ValidationError("no samples to bin");
  }
  std::uint32_t max_count = 0;
  for (const auto& [a, b] : samples.pairs) {
    max_count = std::max({max_count, a, b});
  }
  // integer accumulation, one division per cell: no summation-order effects
  const std::size_t side = static_cast<std::size_t>(max_count) + 1;
  std::vector<std::uint64_t> counts(side * side, 0);
  for (const auto& [a, b] : samples.pairs) {
    ++counts[static_cast<std::size_t>(a) * side + b];
  }
  JointDensity P = zero_joint(max_count);
  const double denom = static_cast<double>(samples.pairs.size());
  for (std::size_t idx = 0; idx < counts.size(); ++idx) {
    P.p[idx] = static_cast<double>(counts[idx]) / denom;
  }
  return P;
}

ExperimentConfig fig2a_config() {
  ExperimentConfig cfg;
  cfg.n_experiments = 20000;
  cfg.lambda_dark = 1.0;
  cfg.lambda_bright = 64.0;
  cfg.class_weights = {0.11, 0.775, 0.115};
  cfg.seed = 0;
  cfg.mode = DetectionMode::single_pmt;
  return cfg;
}

ExperimentConfig fig2b_config() {
  ExperimentConfig cfg = fig2a_config();
  cfg.class_weights = {0.385, 0.22, 0.395};
  return cfg;
}

}  // namespace convbound
