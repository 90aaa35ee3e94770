#include "nngpso/nngpso_swarm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nngpso {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

ObservationConfig ObservationConfig::standard() {
  ObservationConfig cfg;
  cfg.directions = {0.0,      kPi / 4,     kPi / 2,     3 * kPi / 4,
                    kPi,      5 * kPi / 4, 3 * kPi / 2, 7 * kPi / 4};
  cfg.base_radii = {0.5, 1.0, 1.5, 2.0};
  return cfg;
}

void ObservationConfig::validate() const {
  if (directions.empty() || base_radii.empty())
    throw std::invalid_argument("observation config needs directions and radii");
  if (!(m_fac > 0.0 && m_fac < 1.0))
    throw std::invalid_argument("m_fac must be in (0, 1)");
  if (!(gamma_min < 0 && gamma_max > 0))
    throw std::invalid_argument("gamma bounds must straddle 0");
  for (double r : base_radii)
    if (!(r > 0.0)) throw std::invalid_argument("ring radii must be positive");
}

void AlgorithmConfig::validate() const {
  if (particle_count < 1) throw std::invalid_argument("particle_count must be >= 1");
  if (tau_epoch_centralized < 1 || tau_epoch_distributed < 1)
    throw std::invalid_argument("epoch counts must be >= 1");
  if (!(online_lr >= 0.0)) throw std::invalid_argument("online_lr must be non-negative");
  observation.validate();
}

std::vector<Vec2> observation_points(const NngParticle& p, const ObservationConfig& cfg) {
  std::vector<Vec2> points;
  points.reserve(cfg.point_count());
  for (double r : cfg.base_radii) {
    double scaled = p.ring_multiplier * r;
    for (double theta : cfg.directions)
      points.push_back(p.position + scaled * Vec2{std::cos(theta), std::sin(theta)});
  }
  return points;
}

std::vector<double> build_input(const NngParticle& p, std::span<const Vec2> points,
                                const Environment& env) {
  const double e_bound = env.spec().e_bound;
  std::vector<Vec2> all;
  all.reserve(points.size() + 1);
  all.push_back(p.position);
  all.insert(all.end(), points.begin(), points.end());
  std::vector<double> utils(all.size());
  env.utility_batch(all, utils);

  std::vector<double> input;
  input.reserve(3 * all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    input.push_back(all[i].x / e_bound);
    input.push_back(all[i].y / e_bound);
    input.push_back(utils[i]);
  }
  return input;
}

Vec2 predict_next(const Mlp& net, std::span<const double> input, double e_bound) {
  std::vector<double> out = net.forward(input);
  return {e_bound * out[0], e_bound * out[1]};
}

void update_ring(NngParticle& p, double old_util, double new_util,
                 const ObservationConfig& cfg) {
  if (new_util > old_util)
    p.counter -= 1;
  else if (new_util < old_util)
    p.counter += 1;
  else
    return;
  p.counter = std::clamp(p.counter, cfg.gamma_min, cfg.gamma_max);
  p.ring_multiplier = std::pow(cfg.m_fac, -static_cast<double>(p.counter));
}

void re_randomize_branch(NngParticle& p, GlobalBest& best, const Environment& env,
                         bool to_global, Rng& rng) {
  if (to_global) {
    p.position = best.position;
    double fresh = env.utility(best.position);
    if (fresh != best.utility) best.utility = fresh;  // memory went stale; refresh
    p.current_utility = fresh;
  } else {
    const double b = env.domain().bound;
    p.position = {rng.uniform(-b, b), rng.uniform(-b, b)};
    p.current_utility = env.utility(p.position);
  }
  p.ring_multiplier = 1.0;
  p.counter = 0;
}

void re_randomize(NngParticle& p, GlobalBest& best, const Environment& env, Rng& rng) {
  bool to_global = rng.coin();
  re_randomize_branch(p, best, env, to_global, rng);
}

namespace {

struct MoveResult {
  std::vector<double> input;
  Vec2 normalized_next;
  double old_util = 0.0;
  double new_util = 0.0;
};

/// Shared movement phase: observe, predict, move. The particle's own utility
/// in the current landscape comes back as part of its input vector.
MoveResult move_particle(NngParticle& p, const Mlp& net, const Environment& env,
                         const ObservationConfig& cfg) {
  MoveResult r;
  std::vector<Vec2> points = observation_points(p, cfg);
  r.input = build_input(p, points, env);
  r.old_util = r.input[2];  // util(x(t), t)
  std::vector<double> out = net.forward(r.input);
  r.normalized_next = {out[0], out[1]};
  p.position = env.spec().e_bound * r.normalized_next;
  r.new_util = env.utility(p.position);
  p.current_utility = r.new_util;
  return r;
}

void maybe_update_best(GlobalBest& best, const NngParticle& p) {
  if (best.utility < p.current_utility) best = {p.position, p.current_utility};
}

}  // namespace

CnnpsoStepStats cnnpso_update_swarm(CnnpsoState& state, const Environment& env,
                                    const AlgorithmConfig& cfg, Rng& rng) {
  CnnpsoStepStats stats;
  for (NngParticle& p : state.particles) {
    MoveResult move = move_particle(p, state.net, env, cfg.observation);
    if (move.new_util > move.old_util) {
      update_ring(p, move.old_util, move.new_util, cfg.observation);
      TrainingSample sample{std::move(move.input),
                            {move.normalized_next.x, move.normalized_next.y}};
      for (int e = 0; e < cfg.tau_epoch_centralized; ++e) {
        state.net.train_batch(std::span<const TrainingSample>(&sample, 1), cfg.online_lr);
        ++stats.training_steps;
      }
      ++stats.improved;
    } else if (move.new_util < move.old_util) {
      update_ring(p, move.old_util, move.new_util, cfg.observation);
    }
    if (p.counter == cfg.observation.gamma_max) {
      re_randomize(p, state.best, env, rng);
      ++stats.re_randomized;
    }
    maybe_update_best(state.best, p);
  }
  return stats;
}

DnnpsoStepStats dnnpso_update_swarm(DnnpsoState& state, const Environment& env,
                                    const AlgorithmConfig& cfg, Rng& rng) {
  DnnpsoStepStats stats;
  const std::size_t count = state.particles.size();
  const std::int64_t t = env.t();
  const int tau = cfg.tau_epoch_distributed;

  std::vector<std::vector<PropagatedSample>> incoming(count);  // D(t) per particle
  auto deliver = [&](std::size_t to, const PropagatedSample& sample) {
    if (tau - (t - sample.timestamp) <= 0) return;  // would never train
    for (const PropagatedSample& existing : incoming[to])
      if (existing.origin == sample.origin && existing.timestamp == sample.timestamp) return;
    incoming[to].push_back(sample);
  };

  for (std::size_t i = 0; i < count; ++i) {
    NngParticle& p = state.particles[i];
    MoveResult move = move_particle(p, state.nets[i], env, cfg.observation);
    if (move.new_util > move.old_util) {
      update_ring(p, move.old_util, move.new_util, cfg.observation);
      PropagatedSample sample{std::move(move.input), move.normalized_next, t, i};
      for (std::size_t j = 0; j < count; ++j) {
        if (j == i) continue;
        deliver(j, sample);
        for (const PropagatedSample& old : state.received[i]) deliver(j, old);
      }
      ++stats.improved;
    } else if (move.new_util < move.old_util) {
      update_ring(p, move.old_util, move.new_util, cfg.observation);
    }
    if (p.counter == cfg.observation.gamma_max) {
      re_randomize(p, state.best, env, rng);
      ++stats.re_randomized;
    }
    maybe_update_best(state.best, p);
  }

  // Training phase: each particle fits its own net to the received samples,
  // older samples for fewer epochs, own relayed samples never.
  for (std::size_t i = 0; i < count; ++i) {
    for (const PropagatedSample& sample : incoming[i]) {
      if (sample.origin == i) continue;
      int epochs = tau - static_cast<int>(t - sample.timestamp);
      if (epochs <= 0) continue;
      TrainingSample ts{sample.input, {sample.target.x, sample.target.y}};
      for (int e = 0; e < epochs; ++e)
        state.nets[i].train_batch(std::span<const TrainingSample>(&ts, 1), cfg.online_lr);
      stats.training.push_back({i, sample.origin, epochs});
    }
  }

  // Roll buffers forward, discarding samples that would be expired at t+1.
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<PropagatedSample> kept;
    for (PropagatedSample& sample : incoming[i])
      if (tau - (t + 1 - sample.timestamp) > 0) kept.push_back(std::move(sample));
    state.received[i] = std::move(kept);
  }
  return stats;
}

std::vector<GlobalBest> run_experiment(const AlgorithmConfig& cfg, Environment env,
                                       std::vector<Mlp> nets, Rng& swarm_rng) {
  cfg.validate();
  const std::size_t expected_nets =
      cfg.variant == SwarmVariant::centralized ? 1 : cfg.particle_count;
  if (nets.size() != expected_nets)
    throw std::invalid_argument("run_experiment: wrong number of networks");
  for (const Mlp& net : nets)
    if (net.config().input_size() != cfg.observation.input_size())
      throw std::invalid_argument("run_experiment: network input size mismatch");
  if (env.t() != 0)
    throw std::invalid_argument("run_experiment expects the initial environment state");

  const double b = env.domain().bound;
  std::vector<NngParticle> particles(cfg.particle_count);
  for (NngParticle& p : particles)
    p.position = {swarm_rng.uniform(-b, b), swarm_rng.uniform(-b, b)};
  {
    std::vector<Vec2> positions(cfg.particle_count);
    for (std::size_t i = 0; i < particles.size(); ++i) positions[i] = particles[i].position;
    std::vector<double> utils(cfg.particle_count);
    env.utility_batch(positions, utils);
    for (std::size_t i = 0; i < particles.size(); ++i) particles[i].current_utility = utils[i];
  }
  GlobalBest best{particles[0].position, particles[0].current_utility};
  for (const NngParticle& p : particles)
    if (p.current_utility > best.utility) best = {p.position, p.current_utility};

  const std::int64_t t_max = env.spec().t_max;
  std::vector<GlobalBest> history;
  history.reserve(static_cast<std::size_t>(t_max));
  Rng motion = motion_rng(env.spec());

  if (cfg.variant == SwarmVariant::centralized) {
    CnnpsoState state{std::move(particles), std::move(nets[0]), best};
    for (std::int64_t t = 0; t < t_max; ++t) {
      cnnpso_update_swarm(state, env, cfg, swarm_rng);
      history.push_back(state.best);
      env.step_peaks(motion);
    }
  } else {
    DnnpsoState state{std::move(particles), std::move(nets), best,
                      std::vector<std::vector<PropagatedSample>>(cfg.particle_count)};
    for (std::int64_t t = 0; t < t_max; ++t) {
      dnnpso_update_swarm(state, env, cfg, swarm_rng);
      history.push_back(state.best);
      env.step_peaks(motion);
    }
  }
  return history;
}

}  // namespace nngpso
