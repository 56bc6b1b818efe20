#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "convbound/histogram.hpp"

namespace convbound {

enum class FitnessMetric { L1, L2, KL };

// Evolutionary-search settings. The first six fields are the search's
// defining knobs; the rest control stopping and refinement so default runs
// finish in bounded time without touching the search operators.
struct DeconvConfig {
  std::size_t population_size = 200;
  std::size_t generations = 5000;
  double mutation_scale = 0.1;
  double crossover_rate = 0.7;
  std::uint64_t seed = 0;
  FitnessMetric fitness_metric = FitnessMetric::L1;

  // Stop once the best residual reaches this.
  double target_residual = 1e-9;
  // A window of this many generations without a 0.2% relative improvement
  // ends the current search segment. The population is then reseeded and
  // the search continues; it stops entirely once two segments in a row
  // fail to move the best residual meaningfully (or generations run out).
  // 0 disables both checks.
  std::size_t stall_window = 60;
  // Per-generation refinement proposals applied to the best individual
  // (random mass transfers and small mutations, kept when they improve the
  // fitness). 0 disables.
  std::size_t polish_steps = 3000;
  // Worker threads for fitness evaluation. Results are identical for any
  // value: randomness lives only on the master thread.
  unsigned threads = 1;
};

// Throws ConfigError on: population_size < 4, generations < 1,
// mutation_scale <= 0, crossover_rate outside [0,1], target_residual < 0.
void validate(const DeconvConfig& cfg);

// Two independent per-ion distributions.
struct IonPair {
  FrequencyDist g;
  FrequencyDist h;
};

// result[n] = sum_i g_i * h_{n-i}; equals
// antidiagonal_convolve(construct_independent(g, h)).
FrequencyDist convolve_pair(const FrequencyDist& g, const FrequencyDist& h);

struct DeconvResult {
  IonPair pair;
  double residual = 0.0;  // fitness_metric(convolve_pair(pair), target f)
  // (generation, best fitness so far); non-increasing in the second field.
  std::vector<std::pair<std::size_t, double>> trace;
};

// Factor f into two independent distributions over the same support by
// seeded evolutionary search. Same (f, cfg) gives bit-identical results.
// Exhausting generations is not an error; the best pair found is returned.
// Throws ValidationError if f has support {0} only (nothing to factor).
DeconvResult deconvolve(const FrequencyDist& f, const DeconvConfig& cfg);

double fitness_distance(const FrequencyDist& candidate,
                        const FrequencyDist& target, FitnessMetric metric);

}  // namespace convbound
