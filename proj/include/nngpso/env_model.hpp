#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nngpso/geometry.hpp"
#include "nngpso/rng.hpp"

namespace nngpso {

/// One bivariate Gaussian component of the utility landscape. The axes are
/// independent (correlation fixed at zero) and the component drifts toward a
/// static center over time.
struct Peak {
  Vec2 mu;                        // current mean
  Vec2 sigma;                     // per-axis standard deviations
  double rho = 0.0;               // stored for completeness; must be 0
  std::size_t center_index = 0;   // assigned destination
  double initial_distance = 0.0;  // |mu(0) - center|, fixes the speed bound
};

struct EnvironmentSpec {
  double e_bound = 10.0;    // half-width of the square domain
  double e_factor = 0.8;    // initialization shrink factor in (0, 1]
  std::size_t peak_count = 100;
  std::size_t center_count = 50;
  double sigma_min = 0.25;
  double sigma_max = 1.0;
  double omega = 20000.0;   // peak-speed divisor, in timesteps
  std::int64_t t_max = 20000;
  std::uint64_t seed = 0;

  double init_bound() const { return e_factor * e_bound; }
  Box domain() const { return Box{e_bound}; }

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Moves `mu` toward `center` by `speed`, snapping onto the center when the
/// step would overshoot. The offset is scaled by (d - speed) / d, which keeps
/// the center distance non-increasing even under rounding.
Vec2 step_toward(Vec2 mu, Vec2 center, double speed);

/// The dynamic landscape: a sum of drifting Gaussian peaks over a square
/// domain. Snapshots are immutable between steps; step_peaks is single-writer.
class Environment {
 public:
  Environment(EnvironmentSpec spec, std::vector<Peak> peaks, std::vector<Vec2> centers,
              std::int64_t t = 0);

  const EnvironmentSpec& spec() const { return spec_; }
  const std::vector<Peak>& peaks() const { return peaks_; }
  const std::vector<Vec2>& centers() const { return centers_; }
  std::int64_t t() const { return t_; }
  Box domain() const { return spec_.domain(); }

  /// Cumulative density of all peaks at x. Defined for any x, in or out of
  /// bounds.
  double utility(Vec2 x) const;

  /// Batch evaluation; out.size() must equal points.size(). Accumulates in
  /// peak index order, so results match utility() bit for bit.
  void utility_batch(std::span<const Vec2> points, std::span<double> out) const;

  /// Sum of peak density maxima; an upper bound on utility anywhere.
  double max_possible_utility() const;

  /// Advances every peak one step toward its center and increments t.
  /// Speeds are drawn per peak from U(0, initial_distance / omega); arrival
  /// is absorbing. Requires t < spec.t_max.
  void step_peaks(Rng& rng);

  /// Replaces peak means with a recorded snapshot (replay/analysis helper).
  void set_peak_positions(std::span<const Vec2> mus, std::int64_t t);

  std::string to_json_string() const;
  static Environment from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Environment load(const std::filesystem::path& path);

 private:
  EnvironmentSpec spec_;
  std::vector<Peak> peaks_;
  std::vector<Vec2> centers_;
  std::int64_t t_ = 0;

  // flat per-peak evaluation caches
  std::vector<double> mu1_, mu2_, inv_s1_, inv_s2_, pref_;
  void rebuild_static_cache();
  void refresh_position_cache();
};

/// Samples peaks and centers uniformly inside the shrunk initialization box
/// [-e_factor*e_bound, e_factor*e_bound]^2, SDs uniform in [sigma_min,
/// sigma_max], and assigns each peak a uniformly random center.
Environment generate_environment(const EnvironmentSpec& spec, Rng& rng);

/// Convenience overload seeding the draw stream from spec.seed, so the same
/// spec always reproduces the same environment.
Environment generate_environment(const EnvironmentSpec& spec);

/// Stream tag for peak motion; every consumer of an environment derives the
/// same motion stream so trajectories agree across oracle and runs.
Rng motion_rng(const EnvironmentSpec& spec);

}  // namespace nngpso
