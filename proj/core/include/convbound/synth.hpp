#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "convbound/histogram.hpp"
#include "convbound/joint_density.hpp"

namespace convbound {

enum class DetectionMode { single_pmt, two_detector };

// Two-ion Poisson mixture. Per experiment a class is drawn from
// class_weights (both dark, one bright, two bright); the bright ion in the
// one-bright class is chosen 50/50.
struct ExperimentConfig {
  std::uint64_t n_experiments = 20000;
  double lambda_dark = 1.0;
  double lambda_bright = 64.0;
  std::array<double, 3> class_weights{0.11, 0.775, 0.115};
  std::uint64_t seed = 0;
  DetectionMode mode = DetectionMode::single_pmt;
};

// Throws ConfigError unless: n >= 1, 0 < lambda_dark < lambda_bright,
// weights non-negative and summing to 1 within 1e-12.
void validate(const ExperimentConfig& cfg);

// Per-experiment photon counts (a from ion 1, b from ion 2), in experiment
// order. Both detection modes are projections of this one table, which is
// why the single-PMT histogram always equals the anti-diagonal projection
// of the two-detector counts.
struct JointSamples {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
};

// Seeded, thread-count-independent simulation. Experiments are generated in
// fixed shards of 1024; shard s uses an engine seeded with
// derive_seed(cfg.seed, s), and shards are concatenated in order, so any
// `threads` value yields identical output.
JointSamples simulate_pairs(const ExperimentConfig& cfg, unsigned threads = 1);

// Single-PMT view: histogram of a + b.
Histogram to_histogram(const JointSamples& samples, const std::string& label);

// Convenience: simulate and project per cfg.mode semantics.
Histogram simulate_histogram(const ExperimentConfig& cfg,
                             unsigned threads = 1);

// Normalized 2-D count matrix over the observed range (square side =
// max observed count + 1). Throws ValidationError on an empty table.
JointDensity empirical_joint(const JointSamples& samples);

// Rowe-style presets: 20,000 experiments, lambda 1/64, class weights from
// the published band counts over 20,000 (both at seed 0, single-PMT).
ExperimentConfig fig2a_config();
ExperimentConfig fig2b_config();

}  // namespace convbound
