#include <doctest.h>

#include <cmath>

#include "convbound/rng.hpp"

using convbound::rng::derive_seed;
using convbound::rng::Engine;

TEST_SUITE("rng") {

TEST_CASE("derive_seed separates streams and repeats exactly") {
  CHECK(derive_seed(0, 0) == derive_seed(0, 0));
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
  CHECK(derive_seed(0, 0) != derive_seed(1, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("engines with equal seeds emit equal sequences") {
  Engine a(42), b(42), c(43);
  bool all_equal = true;
  bool any_differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto va = a.next();
    all_equal = all_equal && (va == b.next());
    any_differs = any_differs || (va != c.next());
  }
  CHECK(all_equal);
  CHECK(any_differs);
}

TEST_CASE("uniform01 stays inside [0,1)") {
  Engine e(1);
  for (int k = 0; k < 10000; ++k) {
    const double u = e.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_index stays inside range") {
  Engine e(2);
  for (int k = 0; k < 10000; ++k) {
    CHECK(e.uniform_index(7) < 7);
    CHECK(e.uniform_index(1) == 0);
  }
}

TEST_CASE("normal moments") {
  Engine e(3);
  const int n = 40000;
  double sum = 0.0, sumsq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = e.normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("poisson moments across the chunking boundary") {
  Engine e(4);
  for (double lambda : {1.0, 64.0, 600.0}) {
    const int n = lambda > 100 ? 4000 : 20000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += e.poisson(lambda);
    const double mean = sum / n;
    const double se = std::sqrt(lambda / n);
    CHECK(std::abs(mean - lambda) < 4.0 * se);
  }
  CHECK(e.poisson(0.0) == 0);
  CHECK(e.poisson(-1.0) == 0);
}

}  // TEST_SUITE
