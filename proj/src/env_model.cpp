#include "nngpso/env_model.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "nngpso/io.hpp"
#include "json.hpp"

namespace nngpso {

namespace {
constexpr double kTwoPi = 2.0 * 3.141592653589793238462643383279502884;
}

void EnvironmentSpec::validate() const {
  if (!(e_bound > 0.0)) throw std::invalid_argument("e_bound must be positive");
  if (!(e_factor > 0.0 && e_factor <= 1.0))
    throw std::invalid_argument("e_factor must be in (0, 1]");
  if (center_count < 1) throw std::invalid_argument("center_count must be >= 1");
  if (!(sigma_min > 0.0 && sigma_min <= sigma_max))
    throw std::invalid_argument("require 0 < sigma_min <= sigma_max");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (t_max <= 0) throw std::invalid_argument("t_max must be positive");
}

Vec2 step_toward(Vec2 mu, Vec2 center, double speed) {
  Vec2 offset = mu - center;
  double d = offset.norm();
  if (speed >= d) return center;
  double f = (d - speed) / d;  // in [0, 1): shrinks the offset, never grows it
  return center + f * offset;
}

Environment::Environment(EnvironmentSpec spec, std::vector<Peak> peaks,
                         std::vector<Vec2> centers, std::int64_t t)
    : spec_(std::move(spec)), peaks_(std::move(peaks)), centers_(std::move(centers)), t_(t) {
  spec_.validate();
  for (const Peak& p : peaks_) {
    if (p.rho != 0.0) throw std::invalid_argument("peak correlation must be 0");
    if (p.sigma.x < spec_.sigma_min || p.sigma.x > spec_.sigma_max ||
        p.sigma.y < spec_.sigma_min || p.sigma.y > spec_.sigma_max)
      throw std::invalid_argument("peak sigma outside [sigma_min, sigma_max]");
    if (p.center_index >= centers_.size())
      throw std::invalid_argument("peak references an invalid center");
  }
  rebuild_static_cache();
}

void Environment::rebuild_static_cache() {
  const std::size_t n = peaks_.size();
  mu1_.resize(n);
  mu2_.resize(n);
  inv_s1_.resize(n);
  inv_s2_.resize(n);
  pref_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inv_s1_[i] = 1.0 / peaks_[i].sigma.x;
    inv_s2_[i] = 1.0 / peaks_[i].sigma.y;
    pref_[i] = 1.0 / (kTwoPi * peaks_[i].sigma.x * peaks_[i].sigma.y);
  }
  refresh_position_cache();
}

void Environment::refresh_position_cache() {
  for (std::size_t i = 0; i < peaks_.size(); ++i) {
    mu1_[i] = peaks_[i].mu.x;
    mu2_[i] = peaks_[i].mu.y;
  }
}

void Environment::utility_batch(std::span<const Vec2> points, std::span<double> out) const {
  if (out.size() != points.size())
    throw std::invalid_argument("utility_batch: output size mismatch");
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) return;

  // Scratch reused across calls on the same thread.
  thread_local Eigen::ArrayXd qx, qy, acc, ex;
  qx.resize(n);
  qy.resize(n);
  acc.setZero(n);
  ex.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    qx[q] = points[static_cast<std::size_t>(q)].x;
    qy[q] = points[static_cast<std::size_t>(q)].y;
  }
  for (std::size_t i = 0; i < peaks_.size(); ++i) {
    ex = ((qx - mu1_[i]) * inv_s1_[i]).square() + ((qy - mu2_[i]) * inv_s2_[i]).square();
    acc += pref_[i] * (-0.5 * ex).exp();
  }
  for (Eigen::Index q = 0; q < n; ++q) out[static_cast<std::size_t>(q)] = acc[q];
}

double Environment::utility(Vec2 x) const {
  double out = 0.0;
  utility_batch(std::span<const Vec2>(&x, 1), std::span<double>(&out, 1));
  return out;
}

double Environment::max_possible_utility() const {
  double sum = 0.0;
  for (double p : pref_) sum += p;
  return sum;
}

void Environment::step_peaks(Rng& rng) {
  if (t_ >= spec_.t_max)
    throw std::invalid_argument("step_peaks: environment is already at t_max");
  for (Peak& p : peaks_) {
    const Vec2 center = centers_[p.center_index];
    if (p.mu == center) continue;  // arrived peaks stop permanently, no draw
    double speed = rng.uniform(0.0, p.initial_distance / spec_.omega);
    p.mu = step_toward(p.mu, center, speed);
  }
  refresh_position_cache();
  ++t_;
}

void Environment::set_peak_positions(std::span<const Vec2> mus, std::int64_t t) {
  if (mus.size() != peaks_.size())
    throw std::invalid_argument("set_peak_positions: size mismatch");
  for (std::size_t i = 0; i < peaks_.size(); ++i) peaks_[i].mu = mus[i];
  t_ = t;
  refresh_position_cache();
}

Environment generate_environment(const EnvironmentSpec& spec, Rng& rng) {
  spec.validate();
  const double b = spec.init_bound();
  std::vector<Vec2> centers(spec.center_count);
  for (Vec2& c : centers) {
    c.x = rng.uniform(-b, b);
    c.y = rng.uniform(-b, b);
  }
  std::vector<Peak> peaks(spec.peak_count);
  for (Peak& p : peaks) {
    p.mu.x = rng.uniform(-b, b);
    p.mu.y = rng.uniform(-b, b);
    p.sigma.x = rng.uniform(spec.sigma_min, spec.sigma_max);
    p.sigma.y = rng.uniform(spec.sigma_min, spec.sigma_max);
    p.center_index = rng.uniform_index(spec.center_count);
    p.initial_distance = distance(p.mu, centers[p.center_index]);
  }
  return Environment(spec, std::move(peaks), std::move(centers));
}

Environment generate_environment(const EnvironmentSpec& spec) {
  Rng rng(derive_seed(spec.seed, "env-init"));
  return generate_environment(spec, rng);
}

Rng motion_rng(const EnvironmentSpec& spec) {
  return Rng(derive_seed(spec.seed, "peak-motion"));
}

namespace {

nlohmann::json spec_to_json(const EnvironmentSpec& s) {
  return {{"e_bound", s.e_bound},     {"e_factor", s.e_factor},
          {"peak_count", s.peak_count}, {"center_count", s.center_count},
          {"sigma_min", s.sigma_min}, {"sigma_max", s.sigma_max},
          {"omega", s.omega},         {"t_max", s.t_max},
          {"seed", s.seed}};
}

EnvironmentSpec spec_from_json(const nlohmann::json& j) {
  EnvironmentSpec s;
  s.e_bound = j.at("e_bound").get<double>();
  s.e_factor = j.at("e_factor").get<double>();
  s.peak_count = j.at("peak_count").get<std::size_t>();
  s.center_count = j.at("center_count").get<std::size_t>();
  s.sigma_min = j.at("sigma_min").get<double>();
  s.sigma_max = j.at("sigma_max").get<double>();
  s.omega = j.at("omega").get<double>();
  s.t_max = j.at("t_max").get<std::int64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

std::string Environment::to_json_string() const {
  nlohmann::json j;
  j["format"] = "nngpso-env-v1";
  j["spec"] = spec_to_json(spec_);
  j["t"] = t_;
  nlohmann::json centers = nlohmann::json::array();
  for (const Vec2& c : centers_) centers.push_back({c.x, c.y});
  j["centers"] = std::move(centers);
  nlohmann::json peaks = nlohmann::json::array();
  for (const Peak& p : peaks_) {
    peaks.push_back({{"mu", {p.mu.x, p.mu.y}},
                     {"sigma", {p.sigma.x, p.sigma.y}},
                     {"center_index", p.center_index},
                     {"initial_distance", p.initial_distance}});
  }
  j["peaks"] = std::move(peaks);
  return j.dump(2) + "\n";
}

Environment Environment::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != std::string("nngpso-env-v1"))
    throw std::runtime_error("unrecognized environment file format");
  EnvironmentSpec spec = spec_from_json(j.at("spec"));
  std::vector<Vec2> centers;
  for (const auto& c : j.at("centers")) centers.push_back({c.at(0), c.at(1)});
  std::vector<Peak> peaks;
  for (const auto& p : j.at("peaks")) {
    Peak pk;
    pk.mu = {p.at("mu").at(0), p.at("mu").at(1)};
    pk.sigma = {p.at("sigma").at(0), p.at("sigma").at(1)};
    pk.center_index = p.at("center_index").get<std::size_t>();
    pk.initial_distance = p.at("initial_distance").get<double>();
    peaks.push_back(pk);
  }
  return Environment(spec, std::move(peaks), std::move(centers), j.at("t").get<std::int64_t>());
}

void Environment::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json_string());
}

Environment Environment::load(const std::filesystem::path& path) {
  return from_json_string(read_text_file(path));
}

}  // namespace nngpso
