#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "nngpso/metrics.hpp"
#include "nngpso/rng.hpp"

using namespace nngpso;

TEST_CASE("perfect tracking has zero error") {
  std::vector<RunStep> steps;
  for (int t = 0; t < 10; ++t)
    steps.push_back({t, {1.0 * t, 2.0}, 0.5, {1.0 * t, 2.0}, 0.5});
  CHECK(tracking_error(steps) == 0.0);
}

TEST_CASE("the penalty branch weights the 3-4-5 distance") {
  RunStep ok{0, {0, 0}, 0.1, {3, 4}, 0.2};  // util_g <= util_a
  CHECK(lambda_weight(ok) == 1.0);
  CHECK(tracking_error(std::vector<RunStep>{ok}) == doctest::Approx(5.0).epsilon(1e-9));

  RunStep stale{0, {0, 0}, 0.3, {3, 4}, 0.2};  // stored value exceeds the optimum
  CHECK(lambda_weight(stale) == 1.5);
  CHECK(tracking_error(std::vector<RunStep>{stale}) == doctest::Approx(7.5).epsilon(1e-9));

  RunStep tie{0, {0, 0}, 0.2, {3, 4}, 0.2};  // exact tie takes the low branch
  CHECK(lambda_weight(tie) == 1.0);
}

TEST_CASE("environment aggregation uses the population deviation") {
  std::vector<double> errors{1.0, 2.0, 3.0};
  MeanSd stat = aggregate_env(errors);
  CHECK(stat.mean == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(stat.sd == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));

  MeanSd flat = aggregate_env(std::vector<double>{5.0, 5.0, 5.0});
  CHECK(flat.mean == 5.0);
  CHECK(flat.sd == 0.0);

  MeanSd single = aggregate_env(std::vector<double>{7.0});
  CHECK(single.mean == 7.0);
  CHECK(single.sd == 0.0);
}

TEST_CASE("group aggregation folds within- and between-environment spread") {
  std::vector<MeanSd> envs{{2.0, 0.0}, {4.0, 0.0}};
  MeanSd group = aggregate_group(envs);
  CHECK(group.mean == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(group.sd == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<MeanSd> identical{{3.0, 2.0}, {3.0, 2.0}};
  group = aggregate_group(identical);
  CHECK(group.mean == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(group.sd == doctest::Approx(2.0).epsilon(1e-9));

  std::vector<MeanSd> one{{6.5, 1.25}};
  group = aggregate_group(one);
  CHECK(group.mean == 6.5);
  CHECK(group.sd == 1.25);
}

TEST_CASE("aggregation is permutation invariant") {
  Rng rng(15);
  std::vector<double> errors;
  for (int i = 0; i < 12; ++i) errors.push_back(rng.uniform(0, 100));
  MeanSd a = aggregate_env(errors);
  std::vector<double> shuffled = errors;
  for (std::size_t i = shuffled.size() - 1; i > 0; --i)
    std::swap(shuffled[i], shuffled[rng.uniform_index(i + 1)]);
  MeanSd b = aggregate_env(shuffled);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
  CHECK(a.sd == doctest::Approx(b.sd).epsilon(1e-12));
}

TEST_CASE("group deviation dominates the spread of environment means") {
  Rng rng(16);
  std::vector<MeanSd> envs;
  for (int i = 0; i < 8; ++i)
    envs.push_back({rng.uniform(0, 50), rng.uniform(0, 5)});
  MeanSd group = aggregate_group(envs);
  double mean = 0.0;
  for (const MeanSd& e : envs) mean += e.mean;
  mean /= envs.size();
  double between = 0.0;
  for (const MeanSd& e : envs) between += (e.mean - mean) * (e.mean - mean);
  between = std::sqrt(between / envs.size());
  CHECK(group.sd >= between - 1e-12);
}

TEST_CASE("error is positive whenever any step is off target") {
  std::vector<RunStep> steps{{0, {1, 1}, 0.1, {1, 1}, 0.2}, {1, {1, 1}, 0.1, {1.5, 1}, 0.2}};
  CHECK(tracking_error(steps) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("run records round-trip through CSV") {
  std::vector<RunStep> steps;
  Rng rng(77);
  for (int t = 0; t < 25; ++t)
    steps.push_back({t,
                     {rng.uniform(-10, 10), rng.uniform(-10, 10)},
                     rng.uniform(0, 2),
                     {rng.uniform(-10, 10), rng.uniform(-10, 10)},
                     rng.uniform(0, 2)});
  auto path = std::filesystem::temp_directory_path() / "nngpso_run_record.csv";
  save_run_record(path, steps);
  auto loaded = load_run_record(path);
  REQUIRE(loaded.size() == steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CHECK(loaded[i].g == steps[i].g);
    CHECK(loaded[i].a == steps[i].a);
    CHECK(loaded[i].util_g == steps[i].util_g);
    CHECK(loaded[i].util_a == steps[i].util_a);
  }
  CHECK(tracking_error(loaded) == tracking_error(steps));
  std::filesystem::remove(path);
}
