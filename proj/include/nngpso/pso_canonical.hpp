#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "nngpso/env_model.hpp"
#include "nngpso/geometry.hpp"
#include "nngpso/rng.hpp"

namespace nngpso {

struct PsoParams {
  double w = 0.1;   // inertia weight on the previous velocity
  double c1 = 2.0;  // cognitive coefficient
  double c2 = 2.0;  // social coefficient

  void validate() const;
};

struct BestEntry {
  Vec2 position;
  double utility = 0.0;
};

struct PsoSwarm {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  std::vector<BestEntry> personal_bests;
  BestEntry global_best;

  std::size_t size() const { return positions.size(); }
};

/// Fitness evaluated for a batch of positions; out.size() == points.size().
using BatchFitness = std::function<void(std::span<const Vec2>, std::span<double>)>;

/// Initializes a swarm with positions uniform over the box, zero velocities,
/// personal bests at the start positions, and the global best at the fittest
/// initial particle (first one on ties).
PsoSwarm init_swarm(std::size_t particle_count, Box box, const BatchFitness& fitness,
                    Rng& rng);

/// One-particle update rule with explicit random coefficients:
///   v' = c1*r1*(y - x) + c2*r2*(g - x)
///   x' = x + v' + w*v
/// Both the new velocity and the inertia-weighted old velocity contribute to
/// the move; the stored velocity becomes v'.
struct ParticleUpdate {
  Vec2 position;
  Vec2 velocity;
};
ParticleUpdate pso_particle_update(Vec2 x, Vec2 v, Vec2 y, Vec2 g, const PsoParams& params,
                                   double r1, double r2);

/// Advances the whole swarm one step: every particle moves against the
/// current global-best snapshot with fresh r1, r2 ~ U(0,1) per particle, new
/// positions are clamped to the box and evaluated in one batch, then personal
/// and global bests are updated on strict improvement.
void pso_step(PsoSwarm& swarm, const PsoParams& params, const BatchFitness& fitness,
              Box box, Rng& rng);

/// Locates the optimum of a frozen landscape: canonical PSO with swarm size
/// 5x the peak count (w=0.1, c1=c2=2), run until the global best stalls for 5
/// consecutive steps; the whole search restarts 3 times and the best result
/// wins (first one on ties). Throws if the environment has no peaks.
BestEntry find_static_optimum(const Environment& env, Rng& rng);

/// Canonical PSO as a tracker in the moving landscape: one pso_step per
/// timestep against the current state, recording the stored global best
/// after each step. Bests are never re-evaluated as the landscape moves, so
/// their stored utilities go stale; that is the canonical behavior under
/// comparison. Returns t_max entries. The environment is consumed; peak
/// motion uses the environment's derived motion stream.
std::vector<BestEntry> run_baseline_tracker(const PsoParams& params,
                                            std::size_t particle_count, Environment env,
                                            Rng& swarm_rng);

/// Per-timestep true optimum of an environment realization.
struct OracleEntry {
  std::int64_t t = 0;
  Vec2 position;
  double utility = 0.0;
};

struct OracleTrace {
  std::vector<OracleEntry> entries;

  const OracleEntry& at(std::int64_t t) const;
  void save(const std::filesystem::path& path) const;
  static OracleTrace load(const std::filesystem::path& path);
};

/// Computes a(t) for every environment state t = 0..t_max-1, treating each
/// state as frozen. States are independent, so the work is spread over
/// `threads` workers; results do not depend on the schedule.
OracleTrace compute_oracle_trace(const Environment& env, std::uint64_t seed,
                                 std::size_t threads);

}  // namespace nngpso
