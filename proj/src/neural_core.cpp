#include "nngpso/neural_core.hpp"

#include <cmath>
#include <stdexcept>

#include "nngpso/io.hpp"
#include "json.hpp"

namespace nngpso {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kAdagradEps = 1e-8;
}  // namespace

MlpConfig MlpConfig::tracker(int observation_count) {
  MlpConfig cfg;
  cfg.layer_sizes = {3 * (1 + observation_count), 16, 16, 16, 2};
  return cfg;
}

void MlpConfig::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("MlpConfig needs at least input and output sizes");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("MlpConfig layer sizes must be positive");
}

void LrSchedule::validate() const {
  if (alpha_start > alpha_warm)
    throw std::invalid_argument("LrSchedule: alpha_start must not exceed alpha_warm");
  if (alpha_final > alpha_warm)
    throw std::invalid_argument("LrSchedule: alpha_final must not exceed alpha_warm");
  if (warmup_steps < 0 || total_steps < warmup_steps)
    throw std::invalid_argument("LrSchedule: require 0 <= warmup_steps <= total_steps");
}

double LrSchedule::lr_at(std::int64_t step) const {
  if (step < 0 || step > total_steps)
    throw std::invalid_argument("lr_at: step outside [0, total_steps]");
  if (step == 0 && warmup_steps > 0) return alpha_start;
  if (step <= warmup_steps) {
    if (step == warmup_steps) return alpha_warm;
    double f = static_cast<double>(step) / static_cast<double>(warmup_steps);
    return alpha_start + (alpha_warm - alpha_start) * f;
  }
  if (step == total_steps) return alpha_final;
  double f = static_cast<double>(step - warmup_steps) /
             static_cast<double>(total_steps - warmup_steps);
  return alpha_final + (alpha_warm - alpha_final) * 0.5 * (1.0 + std::cos(kPi * f));
}

Mlp::Mlp(MlpConfig config) : config_(std::move(config)) {
  config_.validate();
  layers_.resize(config_.layer_sizes.size() - 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Layer& layer = layers_[l];
    layer.in = config_.layer_sizes[l];
    layer.out = config_.layer_sizes[l + 1];
    layer.weights.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
    layer.biases.assign(layer.out, 0.0);
    layer.acc_weights.assign(layer.weights.size(), 0.0);
    layer.acc_biases.assign(layer.biases.size(), 0.0);
  }
}

Mlp Mlp::init_he(const MlpConfig& config, Rng& rng) {
  Mlp net(config);
  for (Layer& layer : net.layers_) {
    double sd = std::sqrt(2.0 / layer.in);
    for (double& w : layer.weights) w = sd * rng.normal();
    // biases stay zero
  }
  return net;
}

void Mlp::forward_layers(std::span<const double> input,
                         std::vector<std::vector<double>>& activations) const {
  if (input.size() != static_cast<std::size_t>(config_.input_size()))
    throw std::invalid_argument("forward: input length mismatch");
  activations.resize(layers_.size() + 1);
  activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const std::vector<double>& prev = activations[l];
    std::vector<double>& out = activations[l + 1];
    out.assign(static_cast<std::size_t>(layer.out), 0.0);
    const bool is_output = (l + 1 == layers_.size());
    for (int o = 0; o < layer.out; ++o) {
      const double* wrow = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
      double z = layer.biases[static_cast<std::size_t>(o)];
      for (int i = 0; i < layer.in; ++i) z += wrow[i] * prev[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(o)] = is_output ? std::tanh(z) : (z > 0.0 ? z : 0.0);
    }
  }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  std::vector<std::vector<double>> acts;
  forward_layers(input, acts);
  return acts.back();
}

double Mlp::loss_and_gradients(std::span<const TrainingSample> batch,
                               std::vector<double>& gradients) const {
  if (batch.empty()) throw std::invalid_argument("train_batch: empty batch");
  const std::size_t out_size = static_cast<std::size_t>(config_.output_size());
  for (const TrainingSample& s : batch) {
    if (s.target.size() != out_size)
      throw std::invalid_argument("train_batch: target length mismatch");
    for (double t : s.target)
      if (t < -1.0 || t > 1.0)
        throw std::invalid_argument("train_batch: target outside [-1, 1]");
  }

  gradients.assign(parameter_count(), 0.0);
  const double denom = static_cast<double>(batch.size()) * static_cast<double>(out_size);
  double loss = 0.0;

  std::vector<std::vector<double>> acts;
  std::vector<double> delta, delta_prev;
  for (const TrainingSample& sample : batch) {
    forward_layers(sample.input, acts);
    const std::vector<double>& out = acts.back();

    // dL/d(output) for L = sum((out - target)^2) / (batch * out_size)
    delta.assign(out_size, 0.0);
    for (std::size_t k = 0; k < out_size; ++k) {
      double diff = out[k] - sample.target[k];
      loss += diff * diff;
      delta[k] = 2.0 * diff / denom * (1.0 - out[k] * out[k]);  // through tanh
    }

    std::size_t offset = parameter_count();
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Layer& layer = layers_[l];
      const std::vector<double>& prev = acts[l];
      offset -= static_cast<std::size_t>(layer.in) * layer.out + layer.out;
      double* gw = gradients.data() + offset;
      double* gb = gw + static_cast<std::size_t>(layer.in) * layer.out;
      for (int o = 0; o < layer.out; ++o) {
        double d = delta[static_cast<std::size_t>(o)];
        if (d != 0.0) {
          double* grow = gw + static_cast<std::size_t>(o) * layer.in;
          for (int i = 0; i < layer.in; ++i) grow[i] += d * prev[static_cast<std::size_t>(i)];
          gb[o] += d;
        }
      }
      if (l > 0) {
        delta_prev.assign(static_cast<std::size_t>(layer.in), 0.0);
        for (int o = 0; o < layer.out; ++o) {
          double d = delta[static_cast<std::size_t>(o)];
          if (d == 0.0) continue;
          const double* wrow = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
          for (int i = 0; i < layer.in; ++i) delta_prev[static_cast<std::size_t>(i)] += d * wrow[i];
        }
        // through the ReLU of layer l-1's output
        for (int i = 0; i < layer.in; ++i)
          if (prev[static_cast<std::size_t>(i)] <= 0.0) delta_prev[static_cast<std::size_t>(i)] = 0.0;
        delta = delta_prev;
      }
    }
  }
  return loss / denom;
}

double Mlp::train_batch(std::span<const TrainingSample> batch, double lr) {
  std::vector<double> gradients;
  double loss = loss_and_gradients(batch, gradients);
  std::size_t idx = 0;
  for (Layer& layer : layers_) {
    for (std::size_t k = 0; k < layer.weights.size(); ++k, ++idx) {
      double g = gradients[idx];
      layer.acc_weights[k] += g * g;
      layer.weights[k] -= lr * g / (std::sqrt(layer.acc_weights[k]) + kAdagradEps);
    }
    for (std::size_t k = 0; k < layer.biases.size(); ++k, ++idx) {
      double g = gradients[idx];
      layer.acc_biases[k] += g * g;
      layer.biases[k] -= lr * g / (std::sqrt(layer.acc_biases[k]) + kAdagradEps);
    }
  }
  ++step_count_;
  return loss;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.weights.size() + layer.biases.size();
  return n;
}

namespace {
// Maps a flat index to (layer, weight-or-bias slot).
template <typename Layers, typename Fn>
decltype(auto) with_slot(Layers& layers, std::size_t index, Fn&& fn) {
  for (auto& layer : layers) {
    if (index < layer.weights.size()) return fn(layer, index, true);
    index -= layer.weights.size();
    if (index < layer.biases.size()) return fn(layer, index, false);
    index -= layer.biases.size();
  }
  throw std::out_of_range("Mlp parameter index out of range");
}
}  // namespace

double Mlp::get_parameter(std::size_t index) const {
  return with_slot(layers_, index, [](const Layer& l, std::size_t k, bool is_weight) {
    return is_weight ? l.weights[k] : l.biases[k];
  });
}

void Mlp::set_parameter(std::size_t index, double value) {
  with_slot(layers_, index, [value](Layer& l, std::size_t k, bool is_weight) {
    (is_weight ? l.weights[k] : l.biases[k]) = value;
    return 0;
  });
}

double Mlp::get_accumulator(std::size_t index) const {
  return with_slot(layers_, index, [](const Layer& l, std::size_t k, bool is_weight) {
    return is_weight ? l.acc_weights[k] : l.acc_biases[k];
  });
}

std::string Mlp::to_json_string() const {
  nlohmann::json j;
  j["format"] = "nngpso-mlp-v1";
  j["layer_sizes"] = config_.layer_sizes;
  j["step_count"] = step_count_;
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& layer : layers_) {
    layers.push_back({{"weights", layer.weights},
                      {"biases", layer.biases},
                      {"acc_weights", layer.acc_weights},
                      {"acc_biases", layer.acc_biases}});
  }
  j["layers"] = std::move(layers);
  return j.dump() + "\n";
}

Mlp Mlp::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != std::string("nngpso-mlp-v1"))
    throw std::runtime_error("unrecognized weight file format");
  MlpConfig cfg;
  cfg.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  Mlp net(cfg);
  const auto& layers = j.at("layers");
  if (layers.size() != net.layers_.size())
    throw std::runtime_error("weight file layer count mismatch");
  for (std::size_t l = 0; l < net.layers_.size(); ++l) {
    Layer& layer = net.layers_[l];
    auto weights = layers[l].at("weights").get<std::vector<double>>();
    auto biases = layers[l].at("biases").get<std::vector<double>>();
    auto acc_w = layers[l].at("acc_weights").get<std::vector<double>>();
    auto acc_b = layers[l].at("acc_biases").get<std::vector<double>>();
    if (weights.size() != layer.weights.size() || biases.size() != layer.biases.size() ||
        acc_w.size() != layer.acc_weights.size() || acc_b.size() != layer.acc_biases.size())
      throw std::runtime_error("weight file dimension mismatch");
    layer.weights = std::move(weights);
    layer.biases = std::move(biases);
    layer.acc_weights = std::move(acc_w);
    layer.acc_biases = std::move(acc_b);
  }
  net.step_count_ = j.at("step_count").get<std::uint64_t>();
  return net;
}

void Mlp::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json_string());
}

Mlp Mlp::load(const std::filesystem::path& path) {
  return from_json_string(read_text_file(path));
}

}  // namespace nngpso
