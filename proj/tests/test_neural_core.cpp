#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "nngpso/neural_core.hpp"

using namespace nngpso;

namespace {

TrainingSample random_sample(int in, int out, Rng& rng) {
  TrainingSample s;
  s.input.resize(in);
  s.target.resize(out);
  for (double& v : s.input) v = rng.uniform(-2, 2);
  for (double& v : s.target) v = rng.uniform(-1, 1);
  return s;
}

}  // namespace

TEST_CASE("he initialization has the right spread and zero biases") {
  MlpConfig cfg = MlpConfig::tracker(32);
  REQUIRE(cfg.layer_sizes.front() == 99);
  REQUIRE(cfg.layer_sizes.back() == 2);
  Rng rng(2024);
  Mlp net = Mlp::init_he(cfg, rng);

  // first layer: 99*16 weights, then 16 biases
  const std::size_t first_weights = 99 * 16;
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < first_weights; ++i) {
    double w = net.get_parameter(i);
    sum += w;
    sq += w * w;
  }
  double mean = sum / first_weights;
  double var = sq / first_weights - mean * mean;
  CHECK(var > 1.6 / 99);
  CHECK(var < 2.4 / 99);
  for (std::size_t i = 0; i < 16; ++i) CHECK(net.get_parameter(first_weights + i) == 0.0);

  Rng rng2(2024);
  Mlp net2 = Mlp::init_he(cfg, rng2);
  for (std::size_t i = 0; i < net.parameter_count(); ++i)
    CHECK(net.get_parameter(i) == net2.get_parameter(i));
}

TEST_CASE("zero network maps everything to the origin") {
  Mlp net(MlpConfig{{99, 16, 16, 16, 2}});
  std::vector<double> input(99, 0.37);
  auto out = net.forward(input);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("outputs stay inside [-1,1] for random nets and inputs") {
  Rng rng(8);
  MlpConfig cfg{{9, 8, 8, 2}};
  Mlp net = Mlp::init_he(cfg, rng);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> input(9);
    for (double& v : input) v = rng.uniform(-50, 50);
    auto out = net.forward(input);
    for (double o : out) {
      CHECK(o >= -1.0);
      CHECK(o <= 1.0);
    }
  }
}

TEST_CASE("tiny net forward matches the hand computation") {
  Mlp net(MlpConfig{{1, 1, 1}});
  net.set_parameter(0, 0.8);   // w1
  net.set_parameter(1, 0.1);   // b1
  net.set_parameter(2, -1.2);  // w2
  net.set_parameter(3, 0.3);   // b2
  double x = 0.5;
  double hidden = std::max(0.0, 0.8 * x + 0.1);
  double expected = std::tanh(-1.2 * hidden + 0.3);
  auto out = net.forward(std::vector<double>{x});
  CHECK(out[0] == doctest::Approx(expected).epsilon(1e-12));

  // negative preactivation puts the hidden unit to zero
  auto clipped = net.forward(std::vector<double>{-1.0});
  CHECK(clipped[0] == doctest::Approx(std::tanh(0.3)).epsilon(1e-12));
}

TEST_CASE("forward rejects mismatched input lengths") {
  Mlp net(MlpConfig{{4, 3, 2}});
  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("training on the current outputs is a no-op") {
  Rng rng(91);
  Mlp net = Mlp::init_he(MlpConfig{{5, 6, 2}}, rng);
  std::vector<TrainingSample> batch;
  for (int i = 0; i < 4; ++i) {
    TrainingSample s = random_sample(5, 2, rng);
    s.target = net.forward(s.input);
    batch.push_back(std::move(s));
  }
  std::vector<double> before(net.parameter_count());
  for (std::size_t i = 0; i < before.size(); ++i) before[i] = net.get_parameter(i);
  double loss = net.train_batch(batch, 1e-2);
  CHECK(loss == 0.0);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(net.get_parameter(i) == before[i]);
  CHECK(net.step_count() == 1);
}

TEST_CASE("backprop agrees with central finite differences") {
  Rng rng(777);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    MlpConfig cfg{{3, 4, 4, 2}};
    Mlp net = Mlp::init_he(cfg, rng);
    std::vector<TrainingSample> batch;
    for (int i = 0; i < 3; ++i) batch.push_back(random_sample(3, 2, rng));

    std::vector<double> analytic;
    net.loss_and_gradients(batch, analytic);
    std::vector<double> dummy;
    double max_rel = 0.0;
    for (std::size_t p = 0; p < net.parameter_count(); ++p) {
      double saved = net.get_parameter(p);
      net.set_parameter(p, saved + h);
      double up = net.loss_and_gradients(batch, dummy);
      net.set_parameter(p, saved - h);
      double down = net.loss_and_gradients(batch, dummy);
      net.set_parameter(p, saved);
      double fd = (up - down) / (2 * h);
      double denom = std::max({std::abs(fd), std::abs(analytic[p]), 1e-10});
      max_rel = std::max(max_rel, std::abs(fd - analytic[p]) / denom);
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("repeated training drives a single sample to zero loss") {
  Rng rng(5);
  Mlp net = Mlp::init_he(MlpConfig{{4, 8, 2}}, rng);
  TrainingSample s = random_sample(4, 2, rng);
  std::vector<TrainingSample> batch{s};
  double loss = 0.0;
  for (int step = 0; step < 500; ++step) loss = net.train_batch(batch, 0.05);
  CHECK(loss < 1e-4);
}

TEST_CASE("adagrad accumulators never decrease") {
  Rng rng(64);
  Mlp net = Mlp::init_he(MlpConfig{{3, 5, 2}}, rng);
  std::vector<double> acc(net.parameter_count(), 0.0);
  for (int step = 0; step < 50; ++step) {
    std::vector<TrainingSample> batch{random_sample(3, 2, rng)};
    net.train_batch(batch, 1e-3);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      double a = net.get_accumulator(i);
      CHECK(a >= acc[i]);
      acc[i] = a;
    }
  }
}

TEST_CASE("train_batch validates its contract") {
  Mlp net(MlpConfig{{2, 2, 2}});
  CHECK_THROWS_AS(net.train_batch({}, 1e-3), std::invalid_argument);
  TrainingSample bad{{1.0, 2.0}, {1.5, 0.0}};  // target out of range
  std::vector<TrainingSample> batch{bad};
  CHECK_THROWS_AS(net.train_batch(batch, 1e-3), std::invalid_argument);
}

TEST_CASE("schedule endpoints are exact and decay is monotone") {
  LrSchedule s{0.0, 1e-3, 1e-5, 157, 785};
  s.validate();
  CHECK(s.lr_at(0) == 0.0);
  CHECK(s.lr_at(157) == 1e-3);
  CHECK(s.lr_at(785) == 1e-5);
  CHECK(std::abs(s.lr_at(157) - 1e-3) < 1e-12);
  double prev = s.lr_at(157);
  for (std::int64_t step = 158; step <= 785; ++step) {
    double lr = s.lr_at(step);
    CHECK(lr <= prev);
    prev = lr;
  }
  CHECK_THROWS_AS(s.lr_at(-1), std::invalid_argument);
  CHECK_THROWS_AS(s.lr_at(786), std::invalid_argument);
}

TEST_CASE("weight files round-trip and keep optimizer state") {
  Rng rng(33);
  MlpConfig cfg{{6, 5, 2}};
  Mlp net = Mlp::init_he(cfg, rng);
  for (int i = 0; i < 10; ++i) {
    std::vector<TrainingSample> batch{random_sample(6, 2, rng)};
    net.train_batch(batch, 1e-3);
  }

  auto path = std::filesystem::temp_directory_path() / "nngpso_mlp_roundtrip.json";
  net.save(path);
  Mlp loaded = Mlp::load(path);
  for (std::size_t i = 0; i < net.parameter_count(); ++i) {
    CHECK(loaded.get_parameter(i) == net.get_parameter(i));
    CHECK(loaded.get_accumulator(i) == net.get_accumulator(i));
  }
  Rng probe(12);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> input(6);
    for (double& v : input) v = probe.uniform(-3, 3);
    CHECK(loaded.forward(input) == net.forward(input));
  }

  // resumed training matches uninterrupted training bit for bit
  Rng data_a(99), data_b(99);
  Mlp uninterrupted = net;
  for (int i = 0; i < 10; ++i) {
    std::vector<TrainingSample> batch{random_sample(6, 2, data_a)};
    uninterrupted.train_batch(batch, 1e-3);
  }
  for (int i = 0; i < 10; ++i) {
    std::vector<TrainingSample> batch{random_sample(6, 2, data_b)};
    loaded.train_batch(batch, 1e-3);
  }
  for (std::size_t i = 0; i < net.parameter_count(); ++i)
    CHECK(loaded.get_parameter(i) == uninterrupted.get_parameter(i));
  std::filesystem::remove(path);
}

TEST_CASE("loading a mismatched weight file fails") {
  Mlp net(MlpConfig{{2, 3, 2}});
  std::string text = net.to_json_string();
  // a file claiming different layer sizes must be rejected
  std::string bad = text;
  auto pos = bad.find("[2,3,2]");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 7, "[2,3,3]");
  CHECK_THROWS(Mlp::from_json_string(bad));
  CHECK_THROWS(Mlp::from_json_string("{\"format\":\"other\"}"));
}
