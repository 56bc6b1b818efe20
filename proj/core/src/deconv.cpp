#include "convbound/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "convbound/errors.hpp"
#include "convbound/rng.hpp"

namespace convbound {

namespace {

struct Individual {
  std::vector<double> g;
  std::vector<double> h;
  double fitness = 0.0;
};

void convolve_into(const std::vector<double>& g, const std::vector<double>& h,
                   std::vector<double>& out) {
  out.assign(g.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double gi = g[i];
    if (gi == 0.0) continue;
    for (std::size_t j = 0; j < h.size(); ++j) {
      out[i + j] += gi * h[j];
    }
  }
}

double distance(const std::vector<double>& c, const std::vector<double>& f,
                FitnessMetric metric) {
  const std::size_t len = std::max(c.size(), f.size());
  auto at = [](const std::vector<double>& v, std::size_t k) {
    return k < v.size() ? v[k] : 0.0;
  };
  switch (metric) {
    case FitnessMetric::L1: {
      double d = 0.0;
      for (std::size_t k = 0; k < len; ++k) d += std::abs(at(c, k) - at(f, k));
      return d;
    }
    case FitnessMetric::L2: {
      double d = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const double e = at(c, k) - at(f, k);
        d += e * e;
      }
      return std::sqrt(d);
    }
    default: {
      // KL(f || c); zero candidate bins under target support are heavily
      // penalized via the clamp rather than returning infinity
      double d = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const double fk = at(f, k);
        if (fk <= 0.0) continue;
        d += fk * std::log(fk / std::max(at(c, k), 1e-300));
      }
      return d;
    }
  }
}

void normalize_simplex(std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum <= 0.0) {
    const double cell = 1.0 / static_cast<double>(v.size());
    std::fill(v.begin(), v.end(), cell);
    return;
  }
  for (double& x : v) x /= sum;
}

// Poisson pmf over 0..len-1 (unnormalized tail truncation; callers
// renormalize).
void poisson_pmf_into(double mean, std::vector<double>& v) {
  if (mean <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
    return;
  }
  double p = std::exp(-mean);
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = p;
    p *= mean / static_cast<double>(k + 1);
  }
}

// Lobe means mostly span the support uniformly; a third are pushed toward
// very small values so seeds with one narrow factor appear regularly.
// Narrow factors are the hard direction for the search to reach otherwise.
double lobe_mean(double max_mean, rng::Engine& engine) {
  if (engine.uniform01() < 0.35) {
    const double u = engine.uniform01();
    return u * u * std::min(8.0, max_mean);
  }
  return engine.uniform01() * max_mean;
}

// Two-lobe Poisson mixture with randomized means and weight. The floor
// keeps every bin reachable by multiplicative mutation.
void seed_lobes(std::vector<double>& v, double max_mean, rng::Engine& engine,
                std::vector<double>& scratch) {
  const double m1 = lobe_mean(max_mean, engine);
  const double m2 = lobe_mean(max_mean, engine);
  const double w = engine.uniform01();
  poisson_pmf_into(m1, v);
  poisson_pmf_into(m2, scratch);
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = w * v[k] + (1.0 - w) * scratch[k] + 1e-12;
  }
  normalize_simplex(v);
}

void seed_uniform_random(std::vector<double>& v, rng::Engine& engine) {
  for (double& x : v) x = engine.uniform01() + 1e-12;
  normalize_simplex(v);
}

// Change in one output bin's objective term when the convolution at that
// bin moves by step, given residual rn = c_n - f_n and target mass fn.
// L2 terms are squared distances, so summed changes carry the right sign
// for acceptance but are not in distance() units.
double term_delta(double rn, double fn, double step, FitnessMetric metric) {
  switch (metric) {
    case FitnessMetric::L1:
      return std::abs(rn + step) - std::abs(rn);
    case FitnessMetric::L2:
      return step * (2.0 * rn + step);
    default: {
      if (fn <= 0.0) return 0.0;
      const double before = std::max(rn + fn, 1e-300);
      const double after = std::max(rn + fn + step, 1e-300);
      return fn * std::log(before / after);
    }
  }
}

// Exact objective change if mass d moves from bin i to bin j of one
// factor, where o is the other factor and r the current residual of the
// convolution against the target. Only the affected output window is
// visited.
double transfer_delta(const std::vector<double>& r, const std::vector<double>& o,
                      const std::vector<double>& f_padded, std::size_t i,
                      std::size_t j, double d, FitnessMetric metric) {
  const std::size_t len = o.size();
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j) + len - 1;
  double delta = 0.0;
  for (std::size_t n = lo; n <= hi; ++n) {
    double un = 0.0;
    if (n >= j && n - j < len) un += o[n - j];
    if (n >= i && n - i < len) un -= o[n - i];
    if (un == 0.0) continue;
    delta += term_delta(r[n], f_padded[n], d * un, metric);
  }
  return delta;
}

// Same for two simultaneous transfers (i -> j by di, p -> q by dp) within
// the same factor, judged as one proposal. Such a move can improve the
// objective where each half alone would worsen it.
double double_transfer_delta(const std::vector<double>& r,
                             const std::vector<double>& o,
                             const std::vector<double>& f_padded,
                             std::size_t i, std::size_t j, double di,
                             std::size_t p, std::size_t q, double dp,
                             FitnessMetric metric) {
  const std::size_t len = o.size();
  const std::size_t lo = std::min({i, j, p, q});
  const std::size_t hi = std::max({i, j, p, q}) + len - 1;
  double delta = 0.0;
  for (std::size_t n = lo; n <= hi; ++n) {
    double step = 0.0;
    if (n >= j && n - j < len) step += di * o[n - j];
    if (n >= i && n - i < len) step -= di * o[n - i];
    if (n >= q && n - q < len) step += dp * o[n - q];
    if (n >= p && n - p < len) step -= dp * o[n - p];
    if (step == 0.0) continue;
    delta += term_delta(r[n], f_padded[n], step, metric);
  }
  return delta;
}

// Exact objective change for one transfer in each factor judged jointly:
// moving dv from bin i to bin j of v and dw from bin p to bin q of w moves
// the convolution by dv*(shifts of w) + dw*(shifts of v) plus a four-spike
// bilinear cross term. Coupled moves like this can improve where any
// transfer in a single factor worsens.
double cross_transfer_delta(const std::vector<double>& r,
                            const std::vector<double>& v,
                            const std::vector<double>& w,
                            const std::vector<double>& f_padded,
                            std::size_t i, std::size_t j, double dv,
                            std::size_t p, std::size_t q, double dw,
                            FitnessMetric metric) {
  const std::size_t len = v.size();
  const std::size_t lo = std::min({i, j, p, q});
  const std::size_t hi = std::max({i, j, p, q}) + len - 1;
  const double cross = dv * dw;
  double delta = 0.0;
  for (std::size_t n = lo; n <= hi; ++n) {
    double step = 0.0;
    if (n >= j && n - j < len) step += dv * w[n - j];
    if (n >= i && n - i < len) step -= dv * w[n - i];
    if (n >= q && n - q < len) step += dw * v[n - q];
    if (n >= p && n - p < len) step -= dw * v[n - p];
    if (n == j + q || n == i + p) step += cross;
    if (n == j + p || n == i + q) step -= cross;
    if (step == 0.0) continue;
    delta += term_delta(r[n], f_padded[n], step, metric);
  }
  return delta;
}

// Objective in distance() units, computed from the residual r = c - f.
double objective_from_residual(const std::vector<double>& r,
                               const std::vector<double>& f_padded,
                               FitnessMetric metric) {
  double total = 0.0;
  switch (metric) {
    case FitnessMetric::L1:
      for (double x : r) total += std::abs(x);
      return total;
    case FitnessMetric::L2:
      for (double x : r) total += x * x;
      return std::sqrt(total);
    default:
      for (std::size_t n = 0; n < r.size(); ++n) {
        const double fn = f_padded[n];
        if (fn <= 0.0) continue;
        total += fn * std::log(fn / std::max(r[n] + fn, 1e-300));
      }
      return total;
  }
}

// Local refinement of one individual by random proposals, kept only when
// the exactly evaluated objective improves. Most proposals move a random
// fraction of one bin's mass to another bin of the same factor; the
// objective change is computed over the affected output window and the
// residual is updated in O(len) on acceptance. Every 13th proposal
// transfers a bin's full mass, every 7th pairs two transfers into one
// proposal, and every 64th rescales or zeroes a few bins at once and
// rescores by full reconvolution. The latter two can accept moves at
// points where every single transfer worsens the objective on its own.
void polish(Individual& ind, const std::vector<double>& f_padded,
            FitnessMetric metric, std::size_t steps, rng::Engine& engine) {
  const std::size_t len = ind.g.size();
  std::vector<double> r;
  std::vector<double> trial;
  std::vector<double> c;
  convolve_into(ind.g, ind.h, r);
  for (std::size_t n = 0; n < r.size(); ++n) r[n] -= f_padded[n];

  auto apply_transfer = [&r, len](std::vector<double>& v,
                                  const std::vector<double>& o, std::size_t i,
                                  std::size_t j, double d) {
    v[i] -= d;
    v[j] += d;
    for (std::size_t k = 0; k < len; ++k) {
      const double dk = d * o[k];
      r[j + k] += dk;
      r[i + k] -= dk;
    }
  };

  for (std::size_t step = 0; step < steps; ++step) {
    const bool pick_h = engine.uniform_index(2) == 1;
    std::vector<double>& v = pick_h ? ind.h : ind.g;
    const std::vector<double>& o = pick_h ? ind.g : ind.h;

    if (step % 64 == 63) {
      trial = v;
      const std::size_t edits = 1 + engine.uniform_index(8);
      for (std::size_t e = 0; e < edits; ++e) {
        const std::size_t idx = engine.uniform_index(len);
        if (engine.uniform01() < 0.15) {
          trial[idx] = 0.0;
        } else {
          trial[idx] *= std::exp(0.3 * engine.normal());
        }
      }
      normalize_simplex(trial);
      convolve_into(trial, o, c);
      if (distance(c, f_padded, metric) <
          objective_from_residual(r, f_padded, metric)) {
        v = trial;
        for (std::size_t n = 0; n < r.size(); ++n) r[n] = c[n] - f_padded[n];
      }
      continue;
    }

    const std::size_t i = engine.uniform_index(len);
    const std::size_t j = engine.uniform_index(len);
    if (i == j || v[i] <= 0.0) continue;

    if (step % 11 == 5) {
      std::vector<double>& w = pick_h ? ind.g : ind.h;
      const std::size_t p = engine.uniform_index(len);
      const std::size_t q = engine.uniform_index(len);
      if (p == q || w[p] <= 0.0) continue;
      const double u1 = engine.uniform01();
      const double u2 = engine.uniform01();
      const double d1 = v[i] * u1 * u1;
      const double d2 = w[p] * u2 * u2;
      if (d1 <= 0.0 || d2 <= 0.0) continue;
      if (cross_transfer_delta(r, v, w, f_padded, i, j, d1, p, q, d2,
                               metric) < 0.0) {
        // applying the second transfer against the updated first factor
        // reproduces the jointly evaluated convolution exactly
        apply_transfer(v, w, i, j, d1);
        apply_transfer(w, v, p, q, d2);
      }
      continue;
    }

    if (step % 7 == 3) {
      const std::size_t p = engine.uniform_index(len);
      const std::size_t q = engine.uniform_index(len);
      if (p == q || p == i || p == j || q == i || q == j || v[p] <= 0.0) {
        continue;
      }
      const double u1 = engine.uniform01();
      const double u2 = engine.uniform01();
      const double d1 = v[i] * u1 * u1;
      const double d2 = v[p] * u2 * u2;
      if (d1 <= 0.0 || d2 <= 0.0) continue;
      if (double_transfer_delta(r, o, f_padded, i, j, d1, p, q, d2, metric) <
          0.0) {
        apply_transfer(v, o, i, j, d1);
        apply_transfer(v, o, p, q, d2);
      }
      continue;
    }

    // shrinking step ladder: try the largest move along this direction
    // first and scale down until one improves
    double d = step % 13 == 0 ? v[i] : v[i] * engine.uniform01();
    for (int t = 0; t < 3 && d > 0.0; ++t) {
      if (transfer_delta(r, o, f_padded, i, j, d, metric) < 0.0) {
        apply_transfer(v, o, i, j, d);
        break;
      }
      d *= 0.15;
    }
  }

  // transfers conserve mass only up to rounding; restore the simplex
  normalize_simplex(ind.g);
  normalize_simplex(ind.h);
}

// Transfer-only refinement of a single factor with the other held fixed.
// This one-sided fit converges much faster than joint moves, so it turns a
// seed whose fixed factor happens to be roughly right into a competitive
// individual within a few thousand proposals.
void polish_side(Individual& ind, const std::vector<double>& f_padded,
                 FitnessMetric metric, std::size_t steps, bool fit_h,
                 rng::Engine& engine) {
  const std::size_t len = ind.g.size();
  std::vector<double>& v = fit_h ? ind.h : ind.g;
  const std::vector<double>& o = fit_h ? ind.g : ind.h;
  std::vector<double> r;
  convolve_into(ind.g, ind.h, r);
  for (std::size_t n = 0; n < r.size(); ++n) r[n] -= f_padded[n];
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t i = engine.uniform_index(len);
    const std::size_t j = engine.uniform_index(len);
    if (i == j || v[i] <= 0.0) continue;
    double d = step % 13 == 0 ? v[i] : v[i] * engine.uniform01();
    for (int t = 0; t < 3 && d > 0.0; ++t) {
      if (transfer_delta(r, o, f_padded, i, j, d, metric) < 0.0) {
        v[i] -= d;
        v[j] += d;
        for (std::size_t k = 0; k < len; ++k) {
          const double dk = d * o[k];
          r[j + k] += dk;
          r[i + k] -= dk;
        }
        break;
      }
      d *= 0.15;
    }
  }
  normalize_simplex(v);
}

double peakedness(const std::vector<double>& v) {
  double p = 0.0;
  for (double x : v) p += x * x;
  return p;
}

double vector_mean(const std::vector<double>& v) {
  double m = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    m += static_cast<double>(k) * v[k];
  }
  return m;
}

class Evaluator {
 public:
  Evaluator(const std::vector<double>& f_padded, FitnessMetric metric,
            unsigned threads)
      : f_padded_(f_padded), metric_(metric), threads_(std::max(1u, threads)) {}

  double score(const Individual& ind, std::vector<double>& scratch) const {
    convolve_into(ind.g, ind.h, scratch);
    return distance(scratch, f_padded_, metric_);
  }

  // Fills fitness for pop[first..pop.size()). Sharded by index; identical
  // results for any thread count because each entry depends only on the
  // individual it scores.
  void run(std::vector<Individual>& pop, std::size_t first) const {
    const std::size_t count = pop.size() - first;
    if (threads_ == 1 || count < 2 * threads_) {
      std::vector<double> scratch;
      for (std::size_t k = first; k < pop.size(); ++k) {
        pop[k].fitness = score(pop[k], scratch);
      }
      return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads_);
    const std::size_t chunk = (count + threads_ - 1) / threads_;
    for (unsigned w = 0; w < threads_; ++w) {
      const std::size_t lo = first + w * chunk;
      const std::size_t hi = std::min(pop.size(), lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back([this, &pop, lo, hi] {
        std::vector<double> scratch;
        for (std::size_t k = lo; k < hi; ++k) {
          pop[k].fitness = score(pop[k], scratch);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

 private:
  const std::vector<double>& f_padded_;
  FitnessMetric metric_;
  unsigned threads_;
};

}  // namespace

void validate(const DeconvConfig& cfg) {
  if (cfg.population_size < 4) {
    throw ConfigError("population_size must be >= 4");
  }
  if (cfg.generations < 1) {
    throw ConfigError("generations must be >= 1");
  }
  if (!(cfg.mutation_scale > 0.0)) {
    throw ConfigError("mutation_scale must be positive");
  }
  if (!(cfg.crossover_rate >= 0.0 && cfg.crossover_rate <= 1.0)) {
    throw ConfigError("crossover_rate must lie in [0,1]");
  }
  if (!(cfg.target_residual >= 0.0)) {
    throw ConfigError("target_residual must be non-negative");
  }
}

FrequencyDist convolve_pair(const FrequencyDist& g, const FrequencyDist& h) {
  validate(g);
  validate(h);
  std::vector<double> out;
  convolve_into(g.probs, h.probs, out);
  return {std::move(out), 1};
}

double fitness_distance(const FrequencyDist& candidate,
                        const FrequencyDist& target, FitnessMetric metric) {
  return distance(candidate.probs, target.probs, metric);
}

DeconvResult deconvolve(const FrequencyDist& f, const DeconvConfig& cfg) {
  validate(f);
  validate(cfg);
  const std::size_t len = f.probs.size();
  if (len < 2) {
    throw ValidationError("deconvolution needs support beyond count 0");
  }

  std::vector<double> f_padded(2 * len - 1, 0.0);
  std::copy(f.probs.begin(), f.probs.end(), f_padded.begin());

  rng::Engine engine(rng::derive_seed(cfg.seed, 0xDEC0DEull));
  const unsigned threads = cfg.threads == 0
                               ? std::max(1u, std::thread::hardware_concurrency())
                               : cfg.threads;
  const Evaluator evaluator(f_padded, cfg.fitness_metric, threads);

  // proposals touch two bins at a time, so longer supports need
  // proportionally more of them per refinement pass
  const std::size_t steps_scaled =
      cfg.polish_steps * std::max<std::size_t>(1, len / 96);

  // seed: alternate two-lobe Poisson shapes and flat-random vectors
  const double max_mean = static_cast<double>(len - 1);
  std::vector<Individual> pop(cfg.population_size);
  std::vector<double> scratch(len);
  auto reseed = [&](std::vector<Individual>& p) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k % 2 == 0) {
        seed_lobes(p[k].g, max_mean, engine, scratch);
        seed_lobes(p[k].h, max_mean, engine, scratch);
      } else {
        seed_uniform_random(p[k].g, engine);
        seed_uniform_random(p[k].h, engine);
      }
    }
    evaluator.run(p, 0);
    // give the most promising seeds a one-sided fit of their broader
    // factor; a seed only shows its worth once that side has adapted to
    // the narrower one
    if (cfg.polish_steps > 0) {
      std::vector<std::size_t> order(p.size());
      std::iota(order.begin(), order.end(), 0);
      const std::size_t warm = std::min<std::size_t>(32, order.size());
      std::partial_sort(order.begin(), order.begin() + warm, order.end(),
                        [&](std::size_t a, std::size_t b) {
                          return p[a].fitness < p[b].fitness;
                        });
      for (std::size_t w = 0; w < warm; ++w) {
        Individual& ind = p[order[w]];
        const bool g_peaked = peakedness(ind.g) >= peakedness(ind.h);
        polish_side(ind, f_padded, cfg.fitness_metric, steps_scaled,
                    g_peaked, engine);
        ind.fitness = evaluator.score(ind, scratch);
      }
    }
  };
  for (std::size_t k = 0; k < pop.size(); ++k) {
    pop[k].g.resize(len);
    pop[k].h.resize(len);
  }
  reseed(pop);

  auto best_index = [](const std::vector<Individual>& v) {
    std::size_t bi = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k].fitness < v[bi].fitness) bi = k;
    }
    return bi;
  };
  auto worst_index = [](const std::vector<Individual>& v) {
    std::size_t wi = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k].fitness > v[wi].fitness) wi = k;
    }
    return wi;
  };

  // The search runs in segments: when a segment stalls the population is
  // reseeded from scratch so later segments explore other factorizations,
  // while the best individual found anywhere is kept aside as the result.
  // Elitism inside a segment uses the segment's own best so a restart is
  // not pulled straight back into the basin it just left.
  Individual seg_elite = pop[best_index(pop)];
  Individual best = seg_elite;
  std::vector<double> seg_hist;
  seg_hist.push_back(seg_elite.fitness);
  double last_stall_best = std::numeric_limits<double>::infinity();
  int dud_segments = 0;

  DeconvResult result;
  result.trace.reserve(std::min<std::size_t>(cfg.generations + 1, 8192));
  result.trace.emplace_back(0, best.fitness);

  const double mutation_p =
      std::max(0.05, 8.0 / static_cast<double>(len));
  auto tournament = [&]() {
    std::size_t pick = engine.uniform_index(pop.size());
    for (int round = 0; round < 2; ++round) {
      const std::size_t other = engine.uniform_index(pop.size());
      if (pop[other].fitness < pop[pick].fitness) pick = other;
    }
    return pick;
  };
  auto cross = [&](const std::vector<double>& a, const std::vector<double>& b,
                   std::vector<double>& out) {
    out = a;
    if (engine.uniform01() < cfg.crossover_rate) {
      const std::size_t point = 1 + engine.uniform_index(len - 1);
      std::copy(b.begin() + static_cast<std::ptrdiff_t>(point), b.end(),
                out.begin() + static_cast<std::ptrdiff_t>(point));
    }
  };
  auto mutate = [&](std::vector<double>& v) {
    for (double& x : v) {
      if (engine.uniform01() < mutation_p) {
        x *= std::exp(cfg.mutation_scale * engine.normal());
      }
    }
    normalize_simplex(v);
  };

  std::vector<Individual> next(pop.size());
  for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
    next[0] = seg_elite;
    for (std::size_t k = 1; k < pop.size(); ++k) {
      const Individual& pa = pop[tournament()];
      const Individual& pb = pop[tournament()];
      cross(pa.g, pb.g, next[k].g);
      cross(pa.h, pb.h, next[k].h);
      mutate(next[k].g);
      mutate(next[k].h);
      next[k].fitness = 0.0;
    }
    evaluator.run(next, 1);
    pop.swap(next);

    std::size_t gen_best = best_index(pop);
    if (cfg.polish_steps > 0) {
      Individual refined = pop[gen_best];
      polish(refined, f_padded, cfg.fitness_metric, steps_scaled, engine);
      refined.fitness = evaluator.score(refined, scratch);
      // the refined individual enters the population whenever it beats
      // anyone, not only the generation best; selection then decides
      // whether its lineage takes over
      const std::size_t slot = worst_index(pop);
      if (refined.fitness < pop[slot].fitness) {
        const bool leads = refined.fitness < pop[gen_best].fitness;
        pop[slot] = std::move(refined);
        if (leads) gen_best = slot;
      }
    }
    seg_elite = pop[gen_best];
    if (seg_elite.fitness < best.fitness) {
      best = seg_elite;
    }
    result.trace.emplace_back(gen, best.fitness);
    seg_hist.push_back(seg_elite.fitness);

    if (best.fitness <= cfg.target_residual) break;
    if (cfg.stall_window > 0 && seg_hist.size() > cfg.stall_window) {
      const double before = seg_hist[seg_hist.size() - 1 - cfg.stall_window];
      if (before - seg_elite.fitness < 0.002 * before + 1e-15) {
        // grind the best-so-far hard before deciding the segment's fate;
        // per-generation refinement is kept short, so the endgame work
        // happens here and after the loop
        if (cfg.polish_steps > 0) {
          Individual refined = best;
          polish(refined, f_padded, cfg.fitness_metric, steps_scaled * 10,
                 engine);
          refined.fitness = evaluator.score(refined, scratch);
          if (refined.fitness < best.fitness) {
            best = refined;
            result.trace.back().second = best.fitness;
          }
          if (best.fitness <= cfg.target_residual) break;
        }
        // a segment counts as progress only if it moved the best residual
        // by a relative step and a small absolute one; without the latter
        // a solved run keeps spawning segments to shave dust
        if (last_stall_best - best.fitness >=
            std::max(0.02 * last_stall_best, 1e-4)) {
          dud_segments = 0;
        } else if (++dud_segments >= 2) {
          break;
        }
        last_stall_best = best.fitness;
        reseed(pop);
        seg_elite = pop[best_index(pop)];
        seg_hist.clear();
        seg_hist.push_back(seg_elite.fitness);
      }
    }
  }

  // deep refinement of the returned pair, now that no per-generation
  // budget applies; rounds continue while they pay. The trace's final
  // entry reflects the returned residual.
  if (cfg.polish_steps > 0) {
    for (int round = 0; round < 12; ++round) {
      Individual refined = best;
      polish(refined, f_padded, cfg.fitness_metric, steps_scaled * 10,
             engine);
      refined.fitness = evaluator.score(refined, scratch);
      const bool paid = refined.fitness < 0.995 * best.fitness;
      if (refined.fitness < best.fitness) best = refined;
      if (!paid) break;
    }
    result.trace.back().second = best.fitness;
  }

  if (vector_mean(best.g) > vector_mean(best.h)) {
    best.g.swap(best.h);
  }
  result.pair.g = {std::move(best.g), 1};
  result.pair.h = {std::move(best.h), 1};
  result.residual = best.fitness;
  return result;
}

}  // namespace convbound
