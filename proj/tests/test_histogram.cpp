#include <doctest.h>

#include "convbound/errors.hpp"
#include "convbound/histogram.hpp"
#include "convbound/rng.hpp"

using namespace convbound;

TEST_SUITE("histogram") {

TEST_CASE("normalize divides by the total and keeps it") {
  const Histogram h{{10, 10}, "pair"};
  const FrequencyDist f = normalize(h);
  CHECK(f.probs == std::vector<double>{0.5, 0.5});
  CHECK(f.total_experiments == 20);
}

TEST_CASE("normalize handles interior zeros") {
  const FrequencyDist f = normalize({{1, 0, 3}, ""});
  CHECK(f.probs == std::vector<double>{0.25, 0.0, 0.75});
  CHECK(f.total_experiments == 4);
}

TEST_CASE("normalize rejects degenerate histograms") {
  CHECK_THROWS_AS(normalize({{}, ""}), ValidationError);
  CHECK_THROWS_AS(normalize({{0, 0}, ""}), ValidationError);
  CHECK_THROWS_AS(normalize({{1, 0}, ""}), ValidationError);  // trailing zero
}

TEST_CASE("normalize is scale invariant") {
  rng::Engine engine(7);
  for (int trial = 0; trial < 20; ++trial) {
    Histogram h;
    const std::size_t n = 1 + engine.uniform_index(500);
    h.bins.resize(n + 1);
    for (auto& b : h.bins) b = engine.uniform_index(1000);
    h.bins[n] += 1;  // canonical form
    const FrequencyDist base = normalize(h);

    Histogram scaled = h;
    const std::uint64_t k = 2 + engine.uniform_index(99);
    for (auto& b : scaled.bins) b *= k;
    const FrequencyDist same = normalize(scaled);

    // identical real quotients, both correctly rounded: exact equality
    CHECK(same.probs == base.probs);
    double sum = 0.0;
    for (double p : base.probs) sum += p;
    CHECK(std::abs(sum - 1.0) <= kNormalizationTol);
  }
}

TEST_CASE("empirical_stats matches hand enumeration") {
  const auto point = empirical_stats(make_frequency({1.0}));
  CHECK(point.mean == 0.0);
  CHECK(point.variance == 0.0);

  const auto coin = empirical_stats(make_frequency({0.5, 0.5}));
  CHECK(coin.mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(coin.variance == doctest::Approx(0.25).epsilon(1e-15));

  const auto binom = empirical_stats(make_frequency({0.25, 0.5, 0.25}));
  CHECK(binom.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binom.variance == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("frequency validation rejects bad vectors") {
  CHECK_THROWS_AS(make_frequency({}), ValidationError);
  CHECK_THROWS_AS(make_frequency({0.5, 0.4}), ValidationError);
  CHECK_THROWS_AS(make_frequency({1.5, -0.5}), ValidationError);
  CHECK_THROWS_AS(make_frequency({0.5, 0.5}, 0), ValidationError);
}

}  // TEST_SUITE
