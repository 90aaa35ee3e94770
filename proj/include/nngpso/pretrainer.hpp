#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nngpso/env_model.hpp"
#include "nngpso/neural_core.hpp"
#include "nngpso/nngpso_swarm.hpp"
#include "nngpso/pso_canonical.hpp"
#include "nngpso/rng.hpp"

namespace nngpso {

/// Pre-training setup: simplified environments, rollout collection, and the
/// warm-up-plus-cosine training schedule.
struct PretrainConfig {
  std::vector<std::size_t> peak_counts = {25, 50};
  std::vector<std::size_t> center_counts = {5, 10};
  std::int64_t t_max = 10000;
  std::size_t batch_size = 64;  // tau_size
  int epochs = 5;               // tau_epoch
  double alpha_start = 0.0;
  double alpha_warm = 1e-3;
  double alpha_final = 1e-5;
  int repeats = 3;

  // Environment scalars shared with the main experiments.
  double e_bound = 10.0;
  double e_factor = 0.8;
  double sigma_min = 0.25;
  double sigma_max = 1.0;

  ObservationConfig observation = ObservationConfig::standard();

  void validate() const;

  /// Environment spec for one pre-training rollout; peak/center counts are
  /// sampled uniformly from the configured sets. omega equals t_max so the
  /// landscape stays in motion for the whole rollout.
  EnvironmentSpec sample_environment_spec(std::uint64_t env_seed, Rng& rng) const;
};

/// Rolls a single ring-frozen particle (m = 1, no re-randomization) through
/// the environment under the current network, pairing each input with the
/// normalized true optimum from the oracle trace. One sample per timestep.
/// Throws if the trace does not cover every state.
std::vector<TrainingSample> collect_dataset(Environment env, const Mlp& net,
                                            const OracleTrace& oracle,
                                            const ObservationConfig& observation, Rng& rng);

/// Shuffles the dataset into mini-batches each epoch and trains under the
/// schedule: linear warm-up across the first epoch's optimizer steps, cosine
/// decay to alpha_final at the end. Returns the mean pre-update loss per
/// epoch (sample-weighted).
std::vector<double> train_on_dataset(Mlp& net, std::vector<TrainingSample> dataset,
                                     const PretrainConfig& cfg, Rng& shuffle_rng);

struct EpochLoss {
  int repeat = 0;
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
};

struct PretrainReport {
  std::vector<EpochLoss> losses;
  std::vector<std::uint64_t> environment_seeds;  // one per repeat, never reused
};

struct PretrainOptions {
  PretrainConfig cfg;
  std::uint64_t seed = 0;  // base stream for this network; distinct per net
  std::filesystem::path oracle_cache_dir;  // empty: no caching
  std::size_t threads = 1;
};

/// Full pre-training of one network: per repeat, a fresh environment (seed
/// derived from the network's base seed, so no environment is shared across
/// networks), its oracle trace (cached on disk when a cache dir is given), a
/// rollout dataset, and `epochs` epochs of training.
PretrainReport pretrain_network(Mlp& net, const PretrainOptions& opts);

void save_loss_history(const std::filesystem::path& path, const PretrainReport& report);

}  // namespace nngpso
