#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nngpso/env_model.hpp"
#include "nngpso/geometry.hpp"
#include "nngpso/neural_core.hpp"
#include "nngpso/rng.hpp"

namespace nngpso {

/// Ring geometry and adaptation bounds shared by all particles.
struct ObservationConfig {
  std::vector<double> directions;  // radians, ascending
  std::vector<double> base_radii;  // environment units, ascending
  double m_fac = 0.8;              // ring scaling factor, in (0, 1)
  int gamma_min = -10;
  int gamma_max = 10;

  /// Eight compass directions (multiples of pi/4) and radii 0.5..2.0, the
  /// standard 32-point ring set.
  static ObservationConfig standard();

  std::size_t point_count() const { return directions.size() * base_radii.size(); }
  int input_size() const { return 3 * static_cast<int>(1 + point_count()); }
  void validate() const;
};

/// A network-guided particle. The ring multiplier is kept equal to
/// m_fac^(-counter) at all times; both reset together on re-randomization.
struct NngParticle {
  Vec2 position;
  double current_utility = 0.0;
  double ring_multiplier = 1.0;
  int counter = 0;  // gamma, bounded to [gamma_min, gamma_max]
};

/// Training sample shared between particles in the distributed variant.
struct PropagatedSample {
  std::vector<double> input;   // network input of the originating particle
  Vec2 target;                 // its normalized next position, in [-1,1]^2
  std::int64_t timestamp = 0;  // timestep the sample was generated at
  std::size_t origin = 0;      // originating particle index
};

enum class SwarmVariant { centralized, distributed };

struct AlgorithmConfig {
  SwarmVariant variant = SwarmVariant::centralized;
  std::size_t particle_count = 5;
  int tau_epoch_centralized = 1;
  int tau_epoch_distributed = 2;
  double online_lr = 1e-3;  // fixed online rate; AdaGrad state keeps damping
  ObservationConfig observation = ObservationConfig::standard();

  void validate() const;
};

/// Ring intersection points around the particle: for each radius (outer,
/// ascending) and direction (inner, ascending),
///   point = x + (m * r) * (cos theta, sin theta).
std::vector<Vec2> observation_points(const NngParticle& p, const ObservationConfig& cfg);

/// Flattened network input: [x/E, y/E, util(x)] for the particle position
/// followed by the same triple for every observation point, in ring order.
/// Out-of-bounds observation points pass through unclamped.
std::vector<double> build_input(const NngParticle& p, std::span<const Vec2> points,
                                const Environment& env);

/// Scales the network's normalized output back to environment coordinates.
/// tanh output keeps the result inside the domain box.
Vec2 predict_next(const Mlp& net, std::span<const double> input, double e_bound);

/// Ring adaptation: shrink on strict improvement, expand on strict
/// worsening, no change on ties. The counter clamps to its bounds and the
/// multiplier follows it in lockstep, so m = m_fac^(-gamma) always holds.
void update_ring(NngParticle& p, double old_util, double new_util,
                 const ObservationConfig& cfg);

/// Best position the swarm knows about. The stored utility is the value seen
/// when the entry was recorded; it goes stale as the landscape moves and is
/// refreshed only during re-randomization.
struct GlobalBest {
  Vec2 position;
  double utility = 0.0;
};

/// Stagnation escape with the branch chosen explicitly: the particle moves to
/// the stored global best (refreshing its stored utility if the landscape
/// changed under it) or to a uniform random position. Utility is recomputed
/// at the new position; ring multiplier and counter reset.
void re_randomize_branch(NngParticle& p, GlobalBest& best, const Environment& env,
                         bool to_global, Rng& rng);

/// Draws a fair coin for the branch, then defers to re_randomize_branch.
void re_randomize(NngParticle& p, GlobalBest& best, const Environment& env, Rng& rng);

struct CnnpsoState {
  std::vector<NngParticle> particles;
  Mlp net;  // shared by the whole swarm
  GlobalBest best;
};

struct CnnpsoStepStats {
  std::size_t improved = 0;
  std::size_t training_steps = 0;
  std::size_t re_randomized = 0;
};

/// One timestep of the centralized variant: particles move sequentially in
/// index order; an improving particle trains the shared net on its own
/// (input, normalized next position) pair; the global best updates inside
/// the sweep on strict improvement over its stored utility.
CnnpsoStepStats cnnpso_update_swarm(CnnpsoState& state, const Environment& env,
                                    const AlgorithmConfig& cfg, Rng& rng);

struct DnnpsoState {
  std::vector<NngParticle> particles;
  std::vector<Mlp> nets;  // one per particle
  GlobalBest best;
  /// Samples received in the previous timestep (D(t-1)); relayed onward by
  /// improving particles.
  std::vector<std::vector<PropagatedSample>> received;
};

struct DnnpsoTrainEvent {
  std::size_t trainee = 0;
  std::size_t origin = 0;
  int epochs = 0;
};

struct DnnpsoStepStats {
  std::size_t improved = 0;
  std::size_t re_randomized = 0;
  std::vector<DnnpsoTrainEvent> training;
};

/// One timestep of the distributed variant. Movement, rings, and
/// re-randomization as in the centralized variant, but improving particles
/// propagate their sample plus their previously received buffer to every
/// other particle. After the sweep each particle trains its own net on each
/// received sample with epoch count tau_epoch_d - (t - t'), skipping its own
/// relayed samples; expired samples are dropped. Buffers are deduplicated by
/// (origin, timestamp).
DnnpsoStepStats dnnpso_update_swarm(DnnpsoState& state, const Environment& env,
                                    const AlgorithmConfig& cfg, Rng& rng);

/// Full tracking run: particles start uniform in the box, the swarm updates
/// once per timestep, the stored global best is appended to the history, and
/// the peaks move. Returns one entry per timestep, t_max in total. The
/// environment is consumed; peak motion uses the environment's own derived
/// stream so trajectories match the oracle's. `nets` holds one network for
/// the centralized variant and particle_count networks for the distributed
/// one.
std::vector<GlobalBest> run_experiment(const AlgorithmConfig& cfg, Environment env,
                                       std::vector<Mlp> nets, Rng& swarm_rng);

}  // namespace nngpso
