#include <doctest.h>

#include <cmath>
#include <vector>

#include "convbound/discriminator.hpp"
#include "convbound/errors.hpp"
#include "convbound/joint_density.hpp"
#include "convbound/rng.hpp"
#include "oracles.hpp"

using namespace convbound;

namespace {

FrequencyDist poisson_dist(double lambda) {
  std::vector<double> v = oracles::poisson_pmf(lambda);
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return make_frequency(std::move(v));
}

}  // namespace

TEST_SUITE("discriminator") {

TEST_CASE("threshold validation") {
  CHECK_THROWS_AS(validate(ThresholdConfig{0, 5}), ConfigError);
  CHECK_THROWS_AS(validate(ThresholdConfig{-2, 5}), ConfigError);
  CHECK_THROWS_AS(validate(ThresholdConfig{5, 5}), ConfigError);
  CHECK_THROWS_AS(validate(ThresholdConfig{5, 3}), ConfigError);
  CHECK_NOTHROW(validate(ThresholdConfig{25, 86}));
}

TEST_CASE("classify_counts bands and boundaries") {
  SUBCASE("point mass at zero lands in the bottom band") {
    const CategoryCounts c =
        classify_counts(make_frequency({1.0}, 500), {25, 86});
    CHECK(c.n0 == 500.0);
    CHECK(c.n1 == 0.0);
    CHECK(c.n2 == 0.0);
    CHECK(c.total == 500.0);
  }

  SUBCASE("the boundary count belongs to the upper band") {
    std::vector<double> v(87, 0.0);
    v[86] = 1.0;
    const CategoryCounts c =
        classify_counts(make_frequency(std::move(v), 100), {25, 86});
    CHECK(c.n2 == 100.0);
    std::vector<double> w(26, 0.0);
    w[25] = 1.0;
    const CategoryCounts d =
        classify_counts(make_frequency(std::move(w), 100), {25, 86});
    CHECK(d.n1 == 100.0);
  }

  SUBCASE("masses are conserved") {
    rng::Engine engine(5);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> v(120);
      for (auto& x : v) x = engine.uniform01();
      double sum = 0.0;
      for (double x : v) sum += x;
      for (auto& x : v) x /= sum;
      const CategoryCounts c =
          classify_counts(make_frequency(std::move(v), 20000), {25, 86});
      CHECK(c.n0 + c.n1 + c.n2 == doctest::Approx(c.total).epsilon(1e-9));
    }
  }
}

TEST_CASE("category parity statistics match hand arithmetic") {
  const CategoryCounts fig2a_like{2200, 15500, 2300, 20000};
  CHECK(parity_correlation(fig2a_like) ==
        doctest::Approx(-0.55).epsilon(1e-12));
  CHECK(flipped_category_correlation(fig2a_like) ==
        doctest::Approx(0.77).epsilon(1e-12));

  const CategoryCounts fig2b_like{7700, 4400, 7900, 20000};
  CHECK(parity_correlation(fig2b_like) ==
        doctest::Approx(0.56).epsilon(1e-12));
  CHECK(flipped_category_correlation(fig2b_like) ==
        doctest::Approx(0.21).epsilon(1e-12));

  CHECK(parity_correlation({0, 300, 0, 300}) == -1.0);
  CHECK(flipped_category_correlation({300, 0, 0, 300}) == 1.0);
  CHECK(parity_correlation({300, 0, 0, 300}) == 1.0);
}

TEST_CASE("q - q_flipped identity") {
  rng::Engine engine(9);
  for (int trial = 0; trial < 10; ++trial) {
    const double n0 = engine.uniform_index(1000);
    const double n1 = engine.uniform_index(1000);
    const double n2 = engine.uniform_index(1000);
    const CategoryCounts c{n0, n1, n2, n0 + n1 + n2 + 1.0};
    const double lhs =
        parity_correlation(c) - flipped_category_correlation(c);
    CHECK(lhs == doctest::Approx(2.0 * (n2 - n1) / c.total).epsilon(1e-12));
  }
}

TEST_CASE("interpretations reduce to the plain constructors on single bands") {
  // support entirely inside [t1, t2)
  const FrequencyDist mid = make_frequency({0.0, 0.0, 0.6, 0.4});
  const ThresholdConfig t{2, 4};
  CHECK(interpret_rowe(mid, t).p == construct_edge(mid).p);
  CHECK(interpret_other(mid, t).p == construct_diagonal(mid).p);

  // support entirely at or above t2
  const FrequencyDist top =
      make_frequency({0.0, 0.0, 0.0, 0.0, 0.5, 0.5});
  CHECK(interpret_rowe(top, t).p == construct_diagonal(top).p);
  CHECK(interpret_other(top, t).p == construct_edge(top).p);
}

TEST_CASE("sub-threshold mass is placed on the interior for both readings") {
  const FrequencyDist f = make_frequency({0.7, 0.0, 0.3});
  const ThresholdConfig t{5, 9};
  for (const JointDensity& P : {interpret_rowe(f, t), interpret_other(f, t)}) {
    CHECK(P.at(0, 0) == 0.7);
    CHECK(P.at(1, 1) == 0.3);
  }
}

TEST_CASE("interpretation correlations carry the intended signs") {
  // wide band between the thresholds
  std::vector<double> v(30, 0.0);
  for (std::size_t n = 2; n < 30; ++n) v[n] = 1.0 / 28;
  const FrequencyDist mid = make_frequency(std::move(v));
  const ThresholdConfig t{2, 30};
  CHECK(pearson_correlation(interpret_other(mid, t)) > 0.9);
  CHECK(pearson_correlation(interpret_rowe(mid, t)) < 0.0);
}

TEST_CASE("interpretations and blends preserve the convolution") {
  rng::Engine engine(13);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> v(150 + engine.uniform_index(50));
    for (auto& x : v) x = engine.uniform01() < 0.4 ? 0.0 : engine.uniform01();
    v.back() = 1.0;
    double sum = 0.0;
    for (double x : v) sum += x;
    for (auto& x : v) x /= sum;
    const FrequencyDist f = make_frequency(std::move(v));
    const ThresholdConfig t{25, 86};

    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const JointDensity P = blend_interpretations(f, t, lambda);
      const FrequencyDist back = antidiagonal_convolve(P);
      REQUIRE(back.probs.size() == f.probs.size());
      for (std::size_t k = 0; k < f.probs.size(); ++k) {
        CHECK(std::abs(back.probs[k] - f.probs[k]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("blend endpoints reproduce the interpretations exactly") {
  const FrequencyDist f = make_frequency({0.1, 0.2, 0.3, 0.2, 0.1, 0.1});
  const ThresholdConfig t{2, 4};
  CHECK(blend_interpretations(f, t, 1.0).p == interpret_rowe(f, t).p);
  CHECK(blend_interpretations(f, t, 0.0).p == interpret_other(f, t).p);
  CHECK_THROWS_AS(blend_interpretations(f, t, -0.1), ConfigError);
  CHECK_THROWS_AS(blend_interpretations(f, t, 1.1), ConfigError);

  const double r_rowe = pearson_correlation(interpret_rowe(f, t));
  const double r_other = pearson_correlation(interpret_other(f, t));
  const double r_mid =
      pearson_correlation(blend_interpretations(f, t, 0.5));
  CHECK(r_mid > std::min(r_rowe, r_other));
  CHECK(r_mid < std::max(r_rowe, r_other));
}

TEST_CASE("pcc basics") {
  const FrequencyDist same = make_frequency({0.2, 0.3, 0.5});
  for (std::int64_t cut : {0, 1, 2, 3}) {
    CHECK(pcc(same, same, 0.5, cut) == doctest::Approx(0.5).epsilon(1e-15));
  }

  std::vector<double> bright(65, 0.0);
  bright[64] = 1.0;
  CHECK(pcc(make_frequency({1.0}), make_frequency(std::move(bright)), 0.5,
            25) == 1.0);

  CHECK_THROWS_AS(pcc(same, same, -0.1, 3), ConfigError);
  CHECK_THROWS_AS(pcc(same, same, 1.1, 3), ConfigError);
  CHECK_THROWS_AS(pcc(same, same, 0.5, -1), ConfigError);
}

TEST_CASE("pcc swap identity") {
  rng::Engine engine(19);
  const FrequencyDist dark = poisson_dist(2.0);
  const FrequencyDist bright = poisson_dist(40.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double w = engine.uniform01();
    const auto cut = static_cast<std::int64_t>(engine.uniform_index(60));
    CHECK(pcc(dark, bright, w, cut) + pcc(bright, dark, 1.0 - w, cut) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("optimal_cut hand cases") {
  const CutResult perfect =
      optimal_cut(make_frequency({1.0}), make_frequency({0.0, 1.0}), 0.5);
  CHECK(perfect.cut == 1);
  CHECK(perfect.pcc == 1.0);

  const FrequencyDist same = make_frequency({0.2, 0.3, 0.5});
  const CutResult tied = optimal_cut(same, same, 0.5);
  CHECK(tied.pcc == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tied.cut == 0);  // ties break toward the smallest cut
}

TEST_CASE("optimal_cut dominates every cut and matches the CDF oracle") {
  const FrequencyDist dark = poisson_dist(1.0);
  const FrequencyDist bright = poisson_dist(64.0);
  const CutResult best = optimal_cut(dark, bright, 0.5);
  CHECK(best.cut >= 8);
  CHECK(best.cut <= 30);
  CHECK(best.pcc >= 0.999999);

  const auto max_n = static_cast<std::int64_t>(
      std::max(dark.probs.size(), bright.probs.size()) - 1);
  for (std::int64_t cut = 0; cut <= max_n; ++cut) {
    const double direct = 0.5 * oracles::poisson_cdf_below(1.0, cut) +
                          0.5 * (1.0 - oracles::poisson_cdf_below(64.0, cut));
    CHECK(pcc(dark, bright, 0.5, cut) ==
          doctest::Approx(direct).epsilon(1e-9));
    CHECK(best.pcc >= pcc(dark, bright, 0.5, cut) - 1e-15);
  }
}

}  // TEST_SUITE
