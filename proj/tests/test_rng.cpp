#include "doctest.h"
#include "nngpso/rng.hpp"

using namespace nngpso;

TEST_CASE("derive_seed is stable and tag-sensitive") {
  CHECK(derive_seed(42, "a") == derive_seed(42, "a"));
  CHECK(derive_seed(42, "a") != derive_seed(42, "b"));
  CHECK(derive_seed(42, "a") != derive_seed(43, "a"));
}

TEST_CASE("uniform draws stay in range and reproduce") {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform01());
  }
}

TEST_CASE("uniform_index covers the full range") {
  Rng rng(3);
  bool seen[5] = {};
  for (int i = 0; i < 500; ++i) seen[rng.uniform_index(5)] = true;
  for (bool s : seen) CHECK(s);
}

TEST_CASE("normal draws have roughly standard moments") {
  Rng rng(11);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}
