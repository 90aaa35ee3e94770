#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "nngpso/env_model.hpp"

using namespace nngpso;

namespace {

constexpr double kTwoPi = 2.0 * 3.141592653589793238462643383279502884;

EnvironmentSpec small_spec(std::size_t peaks, std::size_t centers, std::uint64_t seed,
                           double sigma_max = 1.0) {
  EnvironmentSpec spec;
  spec.peak_count = peaks;
  spec.center_count = centers;
  spec.sigma_max = sigma_max;
  spec.t_max = 100;
  spec.omega = 100.0;
  spec.seed = seed;
  return spec;
}

/// Single custom peak on an otherwise default domain.
Environment one_peak_env(Vec2 mu, Vec2 sigma) {
  EnvironmentSpec spec = small_spec(1, 1, 0, std::max(sigma.x, sigma.y));
  Peak peak{mu, sigma, 0.0, 0, 0.0};
  return Environment(spec, {peak}, {Vec2{0.0, 0.0}});
}

}  // namespace

TEST_CASE("spec validation rejects broken invariants") {
  CHECK_THROWS_AS(small_spec(1, 0, 0).validate(), std::invalid_argument);
  EnvironmentSpec bad = small_spec(1, 1, 0);
  bad.e_factor = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_spec(1, 1, 0);
  bad.sigma_min = 2.0;  // above sigma_max
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_spec(1, 1, 0);
  bad.omega = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_spec(1, 1, 0);
  bad.t_max = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("nonzero correlation is rejected at construction") {
  EnvironmentSpec spec = small_spec(1, 1, 0);
  Peak peak{{0, 0}, {0.5, 0.5}, 0.3, 0, 0.0};
  CHECK_THROWS_AS(Environment(spec, {peak}, {Vec2{0, 0}}), std::invalid_argument);
}

TEST_CASE("generation samples inside the shrunk box") {
  EnvironmentSpec spec = small_spec(200, 30, 5);
  Environment env = generate_environment(spec);
  const double b = spec.init_bound();
  CHECK(b == doctest::Approx(8.0));
  for (const Peak& p : env.peaks()) {
    CHECK(std::abs(p.mu.x) <= b);
    CHECK(std::abs(p.mu.y) <= b);
    CHECK(p.sigma.x >= spec.sigma_min);
    CHECK(p.sigma.x <= spec.sigma_max);
    CHECK(p.center_index < env.centers().size());
  }
  for (const Vec2& c : env.centers()) {
    CHECK(std::abs(c.x) <= b);
    CHECK(std::abs(c.y) <= b);
  }
}

TEST_CASE("zero peaks means utility zero everywhere") {
  EnvironmentSpec spec = small_spec(0, 1, 9);
  Environment env = generate_environment(spec);
  CHECK(env.peaks().empty());
  CHECK(env.utility({0, 0}) == 0.0);
  CHECK(env.utility({7.3, -2.0}) == 0.0);
  CHECK(env.max_possible_utility() == 0.0);
}

TEST_CASE("same seed reproduces the environment bit for bit") {
  EnvironmentSpec spec = small_spec(50, 10, 42);
  Environment a = generate_environment(spec);
  Environment b = generate_environment(spec);
  REQUIRE(a.peaks().size() == b.peaks().size());
  for (std::size_t i = 0; i < a.peaks().size(); ++i) {
    CHECK(a.peaks()[i].mu == b.peaks()[i].mu);
    CHECK(a.peaks()[i].sigma == b.peaks()[i].sigma);
    CHECK(a.peaks()[i].center_index == b.peaks()[i].center_index);
  }
  for (std::size_t i = 0; i < a.centers().size(); ++i)
    CHECK(a.centers()[i] == b.centers()[i]);
}

TEST_CASE("utility of a unit peak matches the closed form") {
  Environment env = one_peak_env({0, 0}, {1, 1});
  CHECK(env.utility({0, 0}) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-12));
  // hand evaluation of the density one sigma off-center along x
  double expected = std::exp(-0.5) / kTwoPi;
  CHECK(env.utility({1, 0}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("two equal peaks give a symmetric landscape") {
  EnvironmentSpec spec = small_spec(2, 1, 0, 2.0);
  std::vector<Peak> peaks = {{{-2, 0}, {2, 2}, 0.0, 0, 0.0}, {{2, 0}, {2, 2}, 0.0, 0, 0.0}};
  Environment env(spec, peaks, {Vec2{0, 0}});
  for (double v : {0.3, 1.1, 2.7}) {
    CHECK(env.utility({0, v}) == doctest::Approx(env.utility({0, -v})).epsilon(1e-12));
    CHECK(env.utility({v, 0}) == doctest::Approx(env.utility({-v, 0})).epsilon(1e-12));
  }
}

TEST_CASE("isotropic peak is radially symmetric") {
  Environment env = one_peak_env({1.5, -0.5}, {0.7, 0.7});
  const Vec2 mu{1.5, -0.5};
  for (double d : {0.25, 1.0, 3.0}) {
    double reference = env.utility(mu + Vec2{d, 0.0});
    for (int k = 1; k < 16; ++k) {
      double angle = k * 0.3926990816987241;  // pi/8 steps
      Vec2 probe = mu + d * Vec2{std::cos(angle), std::sin(angle)};
      CHECK(env.utility(probe) == doctest::Approx(reference).epsilon(1e-12));
    }
  }
}

TEST_CASE("max_possible_utility bounds the landscape") {
  double expected = 1.0 / kTwoPi + 1.0 / (kTwoPi * 0.25);
  EnvironmentSpec spec = small_spec(2, 1, 0);
  std::vector<Peak> peaks = {{{1, 1}, {1, 1}, 0.0, 0, 0.0}, {{-1, 2}, {0.5, 0.5}, 0.0, 0, 0.0}};
  Environment env(spec, peaks, {Vec2{0, 0}});
  CHECK(env.max_possible_utility() == doctest::Approx(expected).epsilon(1e-12));

  Environment single = one_peak_env({0, 0}, {1, 1});
  CHECK(single.max_possible_utility() == doctest::Approx(1.0 / kTwoPi).epsilon(1e-12));
}

TEST_CASE("utility is non-negative and below the bound at random probes") {
  EnvironmentSpec spec = small_spec(40, 8, 77);
  Environment env = generate_environment(spec);
  const double cap = env.max_possible_utility();
  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    Vec2 x{rng.uniform(-12, 12), rng.uniform(-12, 12)};
    double u = env.utility(x);
    CHECK(u >= 0.0);
    CHECK(u <= cap + 1e-12 * cap);
  }
}

TEST_CASE("step_toward scales along the unit direction") {
  Vec2 moved = step_toward({0, 0}, {3, 4}, 1.0);
  CHECK(moved.x == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(moved.y == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("step_toward snaps on overshoot") {
  Vec2 center{3, 4};
  Vec2 mu = center + 0.1 * Vec2{0.6, 0.8};
  Vec2 moved = step_toward(mu, center, 0.5);
  CHECK(moved == center);
}

TEST_CASE("arrived peaks stay put") {
  EnvironmentSpec spec = small_spec(1, 1, 0);
  Peak peak{{2, 2}, {0.5, 0.5}, 0.0, 0, 0.0};  // already at its center
  Environment env(spec, {peak}, {Vec2{2, 2}});
  Rng rng(1);
  env.step_peaks(rng);
  CHECK(env.peaks()[0].mu == Vec2{2, 2});
  CHECK(env.t() == 1);
}

TEST_CASE("center distance never increases along a trajectory") {
  EnvironmentSpec spec = small_spec(30, 6, 2026);
  Environment env = generate_environment(spec);
  Rng motion = motion_rng(spec);
  std::vector<double> dist(env.peaks().size());
  for (std::size_t i = 0; i < env.peaks().size(); ++i)
    dist[i] = distance(env.peaks()[i].mu, env.centers()[env.peaks()[i].center_index]);
  for (int t = 0; t < 100; ++t) {
    env.step_peaks(motion);
    for (std::size_t i = 0; i < env.peaks().size(); ++i) {
      double d = distance(env.peaks()[i].mu, env.centers()[env.peaks()[i].center_index]);
      CHECK(d <= dist[i]);
      dist[i] = d;
    }
  }
  CHECK_THROWS_AS(env.step_peaks(motion), std::invalid_argument);  // past t_max
}

TEST_CASE("identical seeds give identical trajectories") {
  EnvironmentSpec spec = small_spec(20, 5, 31);
  Environment a = generate_environment(spec);
  Environment b = generate_environment(spec);
  Rng ma = motion_rng(spec), mb = motion_rng(spec);
  for (int t = 0; t < 50; ++t) {
    a.step_peaks(ma);
    b.step_peaks(mb);
    for (std::size_t i = 0; i < a.peaks().size(); ++i)
      CHECK(a.peaks()[i].mu == b.peaks()[i].mu);
  }
}

TEST_CASE("environment files round-trip exactly") {
  EnvironmentSpec spec = small_spec(25, 5, 99);
  Environment env = generate_environment(spec);
  auto path = std::filesystem::temp_directory_path() / "nngpso_env_roundtrip.json";
  env.save(path);
  Environment loaded = Environment::load(path);
  REQUIRE(loaded.peaks().size() == env.peaks().size());
  for (std::size_t i = 0; i < env.peaks().size(); ++i) {
    CHECK(loaded.peaks()[i].mu == env.peaks()[i].mu);
    CHECK(loaded.peaks()[i].sigma == env.peaks()[i].sigma);
    CHECK(loaded.peaks()[i].initial_distance == env.peaks()[i].initial_distance);
  }
  CHECK(loaded.t() == env.t());
  CHECK(loaded.utility({1.0, 2.0}) == env.utility({1.0, 2.0}));
  std::filesystem::remove(path);
}
