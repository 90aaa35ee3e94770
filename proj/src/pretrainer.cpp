#include "nngpso/pretrainer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "nngpso/io.hpp"

namespace nngpso {

void PretrainConfig::validate() const {
  if (peak_counts.empty() || center_counts.empty())
    throw std::invalid_argument("pretrain: peak/center count sets must be non-empty");
  if (batch_size < 1) throw std::invalid_argument("pretrain: batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("pretrain: epochs must be >= 1");
  if (repeats < 1) throw std::invalid_argument("pretrain: repeats must be >= 1");
  if (t_max < 1) throw std::invalid_argument("pretrain: t_max must be >= 1");
  observation.validate();
}

EnvironmentSpec PretrainConfig::sample_environment_spec(std::uint64_t env_seed,
                                                        Rng& rng) const {
  EnvironmentSpec spec;
  spec.e_bound = e_bound;
  spec.e_factor = e_factor;
  spec.sigma_min = sigma_min;
  spec.sigma_max = sigma_max;
  spec.peak_count = peak_counts[rng.uniform_index(peak_counts.size())];
  spec.center_count = center_counts[rng.uniform_index(center_counts.size())];
  spec.t_max = t_max;
  spec.omega = static_cast<double>(t_max);
  spec.seed = env_seed;
  return spec;
}

std::vector<TrainingSample> collect_dataset(Environment env, const Mlp& net,
                                            const OracleTrace& oracle,
                                            const ObservationConfig& observation, Rng& rng) {
  const std::int64_t t_max = env.spec().t_max;
  if (oracle.entries.size() < static_cast<std::size_t>(t_max))
    throw std::runtime_error("collect_dataset: oracle trace does not cover the run");

  const double b = env.domain().bound;
  const double e_bound = env.spec().e_bound;
  NngParticle particle;
  particle.position = {rng.uniform(-b, b), rng.uniform(-b, b)};

  std::vector<TrainingSample> dataset;
  dataset.reserve(static_cast<std::size_t>(t_max));
  Rng motion = motion_rng(env.spec());
  for (std::int64_t t = 0; t < t_max; ++t) {
    std::vector<Vec2> points = observation_points(particle, observation);
    std::vector<double> input = build_input(particle, points, env);
    const OracleEntry& truth = oracle.at(t);
    dataset.push_back(TrainingSample{std::move(input),
                                     {truth.position.x / e_bound, truth.position.y / e_bound}});
    particle.position = predict_next(net, dataset.back().input, e_bound);
    if (t + 1 < t_max) env.step_peaks(motion);
  }
  return dataset;
}

std::vector<double> train_on_dataset(Mlp& net, std::vector<TrainingSample> dataset,
                                     const PretrainConfig& cfg, Rng& shuffle_rng) {
  cfg.validate();
  if (dataset.empty()) throw std::invalid_argument("train_on_dataset: empty dataset");

  const std::size_t n = dataset.size();
  const std::int64_t steps_per_epoch =
      static_cast<std::int64_t>((n + cfg.batch_size - 1) / cfg.batch_size);
  LrSchedule schedule{cfg.alpha_start, cfg.alpha_warm, cfg.alpha_final, steps_per_epoch,
                      steps_per_epoch * cfg.epochs};
  schedule.validate();

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<TrainingSample> batch;
  std::vector<double> epoch_losses;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates on the index order; draws come from the caller's stream.
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.uniform_index(i + 1)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      std::size_t end = std::min(n, start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(dataset[order[k]]);
      double lr = schedule.lr_at(step++);
      double loss = net.train_batch(batch, lr);
      loss_sum += loss * static_cast<double>(end - start);
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(n));
  }
  return epoch_losses;
}

namespace {

std::filesystem::path oracle_cache_path(const std::filesystem::path& dir,
                                        const EnvironmentSpec& spec) {
  std::string name = "pretrain-oracle-s" + std::to_string(spec.seed) + "-h" +
                     std::to_string(spec.peak_count) + "-c" +
                     std::to_string(spec.center_count) + "-t" + std::to_string(spec.t_max) +
                     ".csv";
  return dir / name;
}

}  // namespace

PretrainReport pretrain_network(Mlp& net, const PretrainOptions& opts) {
  opts.cfg.validate();
  PretrainReport report;
  for (int repeat = 0; repeat < opts.cfg.repeats; ++repeat) {
    const std::uint64_t env_seed =
        derive_seed(opts.seed, "pretrain-env/" + std::to_string(repeat));
    Rng repeat_rng(derive_seed(opts.seed, "pretrain-run/" + std::to_string(repeat)));

    EnvironmentSpec spec = opts.cfg.sample_environment_spec(env_seed, repeat_rng);
    report.environment_seeds.push_back(env_seed);
    Environment env = generate_environment(spec);

    OracleTrace oracle;
    if (!opts.oracle_cache_dir.empty()) {
      auto path = oracle_cache_path(opts.oracle_cache_dir, spec);
      if (std::filesystem::exists(path)) {
        oracle = OracleTrace::load(path);
      } else {
        oracle = compute_oracle_trace(env, derive_seed(env_seed, "oracle"), opts.threads);
        oracle.save(path);
      }
    } else {
      oracle = compute_oracle_trace(env, derive_seed(env_seed, "oracle"), opts.threads);
    }

    std::vector<TrainingSample> dataset =
        collect_dataset(std::move(env), net, oracle, opts.cfg.observation, repeat_rng);
    std::vector<double> losses = train_on_dataset(net, std::move(dataset), opts.cfg, repeat_rng);
    for (int epoch = 0; epoch < static_cast<int>(losses.size()); ++epoch)
      report.losses.push_back({repeat, epoch + 1, losses[static_cast<std::size_t>(epoch)]});
  }
  return report;
}

void save_loss_history(const std::filesystem::path& path, const PretrainReport& report) {
  std::string out = "repeat,epoch,mean_loss\n";
  for (const EpochLoss& e : report.losses) {
    out += std::to_string(e.repeat);
    out += ',';
    out += std::to_string(e.epoch);
    out += ',';
    out += format_double(e.mean_loss);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace nngpso
