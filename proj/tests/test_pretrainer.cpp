#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "nngpso/io.hpp"
#include "nngpso/pretrainer.hpp"

using namespace nngpso;

namespace {

PretrainConfig tiny_config() {
  PretrainConfig cfg;
  cfg.peak_counts = {3};
  cfg.center_counts = {2};
  cfg.t_max = 30;
  cfg.batch_size = 8;
  cfg.epochs = 2;
  cfg.repeats = 2;
  return cfg;
}

}  // namespace

TEST_CASE("sampled pre-training specs keep the landscape moving") {
  PretrainConfig cfg = tiny_config();
  Rng rng(4);
  EnvironmentSpec spec = cfg.sample_environment_spec(123, rng);
  CHECK(spec.seed == 123);
  CHECK(spec.omega == static_cast<double>(cfg.t_max));
  CHECK(spec.t_max == cfg.t_max);
  CHECK(spec.peak_count == 3);
  CHECK(spec.center_count == 2);
}

TEST_CASE("rollout collection pairs every state with the oracle label") {
  PretrainConfig cfg = tiny_config();
  Rng rng(9);
  EnvironmentSpec spec = cfg.sample_environment_spec(55, rng);
  Environment env = generate_environment(spec);
  OracleTrace oracle = compute_oracle_trace(env, 7, 2);

  Mlp net(MlpConfig::tracker(32));
  Rng roll(2);
  auto dataset = collect_dataset(env, net, oracle, cfg.observation, roll);
  REQUIRE(dataset.size() == static_cast<std::size_t>(cfg.t_max));
  for (const TrainingSample& s : dataset) {
    CHECK(s.input.size() == 99);
    REQUIRE(s.target.size() == 2);
    CHECK(s.target[0] >= -1.0);
    CHECK(s.target[0] <= 1.0);
    CHECK(s.target[1] >= -1.0);
    CHECK(s.target[1] <= 1.0);
  }
}

TEST_CASE("a static single peak labels every sample with its mean") {
  EnvironmentSpec spec;
  spec.peak_count = 1;
  spec.center_count = 1;
  spec.t_max = 10;
  spec.omega = 10.0;
  Peak peak{{3, -4}, {1, 1}, 0.0, 0, 0.0};
  Environment env(spec, {peak}, {Vec2{3, -4}});
  OracleTrace oracle = compute_oracle_trace(env, 3, 2);

  Mlp net(MlpConfig::tracker(32));
  Rng roll(1);
  auto dataset = collect_dataset(env, net, oracle, ObservationConfig::standard(), roll);
  for (const TrainingSample& s : dataset) {
    CHECK(s.target[0] == doctest::Approx(0.3).epsilon(0.02));
    CHECK(s.target[1] == doctest::Approx(-0.4).epsilon(0.02));
  }
}

TEST_CASE("a short oracle trace is a data error") {
  PretrainConfig cfg = tiny_config();
  Rng rng(9);
  Environment env = generate_environment(cfg.sample_environment_spec(55, rng));
  OracleTrace oracle;
  oracle.entries.push_back({0, {0, 0}, 0.1});
  Mlp net(MlpConfig::tracker(32));
  Rng roll(2);
  CHECK_THROWS(collect_dataset(env, net, oracle, cfg.observation, roll));
}

TEST_CASE("the first optimizer step uses a zero learning rate") {
  PretrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  cfg.batch_size = 64;
  Rng init(3);
  Mlp net = Mlp::init_he(MlpConfig{{4, 4, 2}}, init);
  std::vector<TrainingSample> dataset;
  Rng data(8);
  for (int i = 0; i < 10; ++i) {  // one batch, one step
    TrainingSample s;
    s.input = {data.uniform(-1, 1), data.uniform(-1, 1), data.uniform(-1, 1),
               data.uniform(-1, 1)};
    s.target = {data.uniform(-1, 1), data.uniform(-1, 1)};
    dataset.push_back(std::move(s));
  }
  std::vector<double> before(net.parameter_count());
  for (std::size_t i = 0; i < before.size(); ++i) before[i] = net.get_parameter(i);
  Rng shuffle(1);
  auto losses = train_on_dataset(net, dataset, cfg, shuffle);
  REQUIRE(losses.size() == 1);
  CHECK(std::isfinite(losses[0]));
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(net.get_parameter(i) == before[i]);
}

TEST_CASE("training lowers the epoch loss on a fixed dataset") {
  Rng init(21);
  Mlp net = Mlp::init_he(MlpConfig::tracker(32), init);
  PretrainConfig cfg = tiny_config();
  cfg.epochs = 5;
  cfg.batch_size = 16;

  // synthetic regression toward a fixed map keeps this test self-contained
  std::vector<TrainingSample> dataset;
  Rng data(77);
  for (int i = 0; i < 200; ++i) {
    TrainingSample s;
    s.input.resize(99);
    for (double& v : s.input) v = data.uniform(-1, 1);
    s.target = {std::tanh(s.input[0] + s.input[3]), std::tanh(s.input[1] - s.input[6])};
    dataset.push_back(std::move(s));
  }
  Rng shuffle(5);
  auto losses = train_on_dataset(net, dataset, cfg, shuffle);
  REQUIRE(losses.size() == 5);
  for (double l : losses) CHECK(std::isfinite(l));
  CHECK(losses[4] < losses[0]);
}

TEST_CASE("pre-training uses fresh environments and is reproducible") {
  PretrainConfig cfg = tiny_config();
  Mlp net_a(MlpConfig::tracker(32));
  Mlp net_b(MlpConfig::tracker(32));
  PretrainOptions opts;
  opts.cfg = cfg;
  opts.seed = 404;
  opts.threads = 2;

  PretrainReport ra = pretrain_network(net_a, opts);
  PretrainReport rb = pretrain_network(net_b, opts);
  REQUIRE(ra.environment_seeds.size() == 2);
  CHECK(ra.environment_seeds[0] != ra.environment_seeds[1]);
  CHECK(ra.environment_seeds == rb.environment_seeds);
  REQUIRE(ra.losses.size() == 4);  // 2 repeats x 2 epochs
  for (std::size_t i = 0; i < ra.losses.size(); ++i) {
    CHECK(std::isfinite(ra.losses[i].mean_loss));
    CHECK(ra.losses[i].mean_loss == rb.losses[i].mean_loss);
  }
  for (std::size_t i = 0; i < net_a.parameter_count(); ++i)
    CHECK(net_a.get_parameter(i) == net_b.get_parameter(i));

  // a different network seed draws different environments
  Mlp net_c(MlpConfig::tracker(32));
  PretrainOptions other = opts;
  other.seed = 405;
  PretrainReport rc = pretrain_network(net_c, other);
  CHECK(rc.environment_seeds[0] != ra.environment_seeds[0]);
}

TEST_CASE("loss history files carry one row per repeat-epoch") {
  PretrainReport report;
  report.losses = {{0, 1, 0.5}, {0, 2, 0.25}, {1, 1, 0.4}};
  auto path = std::filesystem::temp_directory_path() / "nngpso_loss_history.csv";
  save_loss_history(path, report);
  auto rows = read_csv(path, "repeat,epoch,mean_loss");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][2] == "0.25");
  std::filesystem::remove(path);
}
