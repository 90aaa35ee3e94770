#include "nngpso/pso_canonical.hpp"

#include <stdexcept>
#include <string>

#include "nngpso/io.hpp"
#include "nngpso/parallel.hpp"

namespace nngpso {

void PsoParams::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("c1 and c2 must be positive");
}

PsoSwarm init_swarm(std::size_t particle_count, Box box, const BatchFitness& fitness,
                    Rng& rng) {
  PsoSwarm swarm;
  swarm.positions.resize(particle_count);
  swarm.velocities.assign(particle_count, Vec2{});
  for (Vec2& p : swarm.positions) {
    p.x = rng.uniform(-box.bound, box.bound);
    p.y = rng.uniform(-box.bound, box.bound);
  }
  std::vector<double> utils(particle_count);
  fitness(swarm.positions, utils);
  swarm.personal_bests.resize(particle_count);
  for (std::size_t i = 0; i < particle_count; ++i)
    swarm.personal_bests[i] = {swarm.positions[i], utils[i]};
  swarm.global_best = swarm.personal_bests.empty() ? BestEntry{} : swarm.personal_bests[0];
  for (std::size_t i = 1; i < particle_count; ++i)
    if (swarm.personal_bests[i].utility > swarm.global_best.utility)
      swarm.global_best = swarm.personal_bests[i];
  return swarm;
}

ParticleUpdate pso_particle_update(Vec2 x, Vec2 v, Vec2 y, Vec2 g, const PsoParams& params,
                                   double r1, double r2) {
  Vec2 v_new = params.c1 * r1 * (y - x) + params.c2 * r2 * (g - x);
  Vec2 x_new = x + v_new + params.w * v;
  return {x_new, v_new};
}

void pso_step(PsoSwarm& swarm, const PsoParams& params, const BatchFitness& fitness,
              Box box, Rng& rng) {
  const Vec2 g = swarm.global_best.position;  // snapshot for the whole sweep
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    double r1 = rng.uniform01();
    double r2 = rng.uniform01();
    ParticleUpdate u = pso_particle_update(swarm.positions[i], swarm.velocities[i],
                                           swarm.personal_bests[i].position, g, params, r1, r2);
    swarm.positions[i] = box.clamp(u.position);
    swarm.velocities[i] = u.velocity;
  }
  std::vector<double> utils(swarm.size());
  fitness(swarm.positions, utils);
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    if (utils[i] > swarm.personal_bests[i].utility)
      swarm.personal_bests[i] = {swarm.positions[i], utils[i]};
    if (utils[i] > swarm.global_best.utility)
      swarm.global_best = {swarm.positions[i], utils[i]};
  }
}

BestEntry find_static_optimum(const Environment& env, Rng& rng) {
  if (env.peaks().empty())
    throw std::invalid_argument("find_static_optimum: environment has no peaks");

  const std::size_t particle_count = 5 * env.peaks().size();
  const PsoParams params{0.1, 2.0, 2.0};
  const Box box = env.domain();
  const BatchFitness fitness = [&env](std::span<const Vec2> pts, std::span<double> out) {
    env.utility_batch(pts, out);
  };

  // Restart seeds are drawn up front; restarts are independent searches.
  std::uint64_t seeds[3] = {rng.next_u64(), rng.next_u64(), rng.next_u64()};

  BestEntry best{};
  bool have_best = false;
  for (std::uint64_t seed : seeds) {
    Rng restart_rng(seed);
    PsoSwarm swarm = init_swarm(particle_count, box, fitness, restart_rng);
    int stall = 0;
    while (stall < 5) {
      double before = swarm.global_best.utility;
      pso_step(swarm, params, fitness, box, restart_rng);
      stall = swarm.global_best.utility > before ? 0 : stall + 1;
    }
    if (!have_best || swarm.global_best.utility > best.utility) {
      best = swarm.global_best;
      have_best = true;
    }
  }
  return best;
}

std::vector<BestEntry> run_baseline_tracker(const PsoParams& params,
                                            std::size_t particle_count, Environment env,
                                            Rng& swarm_rng) {
  params.validate();
  if (particle_count < 1)
    throw std::invalid_argument("run_baseline_tracker: need at least one particle");
  if (env.t() != 0)
    throw std::invalid_argument("run_baseline_tracker expects the initial environment state");

  const Box box = env.domain();
  const BatchFitness fitness = [&env](std::span<const Vec2> pts, std::span<double> out) {
    env.utility_batch(pts, out);
  };
  PsoSwarm swarm = init_swarm(particle_count, box, fitness, swarm_rng);
  Rng motion = motion_rng(env.spec());

  const std::int64_t t_max = env.spec().t_max;
  std::vector<BestEntry> history;
  history.reserve(static_cast<std::size_t>(t_max));
  for (std::int64_t t = 0; t < t_max; ++t) {
    pso_step(swarm, params, fitness, box, swarm_rng);
    history.push_back(swarm.global_best);
    env.step_peaks(motion);
  }
  return history;
}

const OracleEntry& OracleTrace::at(std::int64_t t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= entries.size())
    throw std::out_of_range("oracle trace has no entry for t=" + std::to_string(t));
  const OracleEntry& e = entries[static_cast<std::size_t>(t)];
  if (e.t != t) throw std::runtime_error("oracle trace is not indexed by t");
  return e;
}

void OracleTrace::save(const std::filesystem::path& path) const {
  std::string out = "t,a_x,a_y,util_a\n";
  for (const OracleEntry& e : entries) {
    out += std::to_string(e.t);
    out += ',';
    out += format_double(e.position.x);
    out += ',';
    out += format_double(e.position.y);
    out += ',';
    out += format_double(e.utility);
    out += '\n';
  }
  write_text_file(path, out);
}

OracleTrace OracleTrace::load(const std::filesystem::path& path) {
  OracleTrace trace;
  for (const auto& row : read_csv(path, "t,a_x,a_y,util_a")) {
    if (row.size() != 4) throw std::runtime_error("bad oracle trace row in " + path.string());
    OracleEntry e;
    e.t = parse_int(row[0]);
    e.position = {parse_double(row[1]), parse_double(row[2])};
    e.utility = parse_double(row[3]);
    trace.entries.push_back(e);
  }
  return trace;
}

OracleTrace compute_oracle_trace(const Environment& env, std::uint64_t seed,
                                 std::size_t threads) {
  if (env.t() != 0)
    throw std::invalid_argument("compute_oracle_trace expects the initial environment state");
  const std::size_t steps = static_cast<std::size_t>(env.spec().t_max);
  const std::size_t n_peaks = env.peaks().size();

  // Record the peak trajectory once; each state is then solved independently.
  std::vector<Vec2> trajectory(steps * n_peaks);
  {
    Environment walker = env;
    Rng motion = motion_rng(env.spec());
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t i = 0; i < n_peaks; ++i)
        trajectory[t * n_peaks + i] = walker.peaks()[i].mu;
      if (t + 1 < steps) walker.step_peaks(motion);
    }
  }

  OracleTrace trace;
  trace.entries.resize(steps);
  parallel_for(steps, threads, [&](std::size_t t) {
    Environment state = env;
    state.set_peak_positions(
        std::span<const Vec2>(trajectory.data() + t * n_peaks, n_peaks),
        static_cast<std::int64_t>(t));
    Rng state_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    BestEntry best = find_static_optimum(state, state_rng);
    trace.entries[t] = {static_cast<std::int64_t>(t), best.position, best.utility};
  });
  return trace;
}

}  // namespace nngpso
