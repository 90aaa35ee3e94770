#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nngpso/rng.hpp"

namespace nngpso {

/// Fully connected net shape: ReLU on hidden layers, tanh on the output.
struct MlpConfig {
  std::vector<int> layer_sizes;

  /// Tracker configuration: 3*(1 + observation_count) inputs, three hidden
  /// layers of 16, two outputs.
  static MlpConfig tracker(int observation_count);

  void validate() const;
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
};

struct TrainingSample {
  std::vector<double> input;
  std::vector<double> target;  // components in [-1, 1]
};

/// Learning-rate schedule: linear warm-up from alpha_start to alpha_warm over
/// warmup_steps, then cosine decay to alpha_final at total_steps.
struct LrSchedule {
  double alpha_start = 0.0;
  double alpha_warm = 1e-3;
  double alpha_final = 1e-5;
  std::int64_t warmup_steps = 0;
  std::int64_t total_steps = 0;

  void validate() const;
  /// Valid for 0 <= step <= total_steps; endpoints are returned exactly.
  double lr_at(std::int64_t step) const;
};

/// Minimal MLP with exact backpropagation and AdaGrad state. Single-writer
/// during training; concurrent read-only forward passes are safe.
class Mlp {
 public:
  explicit Mlp(MlpConfig config);  // all parameters and accumulators zero

  static Mlp init_he(const MlpConfig& config, Rng& rng);

  const MlpConfig& config() const { return config_; }
  std::uint64_t step_count() const { return step_count_; }

  /// ReLU hidden layers, tanh output; output components are in [-1, 1].
  std::vector<double> forward(std::span<const double> input) const;

  /// Mean squared error over all output components of the batch, exact
  /// gradients, AdaGrad update theta -= lr * g / (sqrt(acc) + 1e-8).
  /// Returns the pre-update loss. Throws on an empty batch, a dimension
  /// mismatch, or a target outside [-1, 1].
  double train_batch(std::span<const TrainingSample> batch, double lr);

  /// Loss and flattened gradient without applying an update (gradient-check
  /// support; train_batch uses the same path).
  double loss_and_gradients(std::span<const TrainingSample> batch,
                            std::vector<double>& gradients) const;

  // Flat parameter access, ordered layer by layer (weights row-major, then
  // biases). Used by the serializer and by finite-difference tests.
  std::size_t parameter_count() const;
  double get_parameter(std::size_t index) const;
  void set_parameter(std::size_t index, double value);
  double get_accumulator(std::size_t index) const;

  std::string to_json_string() const;
  static Mlp from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Mlp load(const std::filesystem::path& path);

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;  // row-major [out x in]
    std::vector<double> biases;
    std::vector<double> acc_weights;  // AdaGrad sums of squared gradients
    std::vector<double> acc_biases;
  };

  MlpConfig config_;
  std::vector<Layer> layers_;
  std::uint64_t step_count_ = 0;

  // activations[0] is the input; activations[layers_.size()] the output.
  void forward_layers(std::span<const double> input,
                      std::vector<std::vector<double>>& activations) const;
};

}  // namespace nngpso
