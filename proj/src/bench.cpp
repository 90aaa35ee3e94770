#include "nngpso/bench.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

#include "nngpso/io.hpp"
#include "json.hpp"

namespace nngpso {

namespace {

std::string two_digits(std::size_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%02zu", v);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string AlgorithmSpecEntry::kind_name() const {
  switch (kind) {
    case AlgorithmKind::pso: return "pso";
    case AlgorithmKind::cnnpso: return "cnnpso";
    case AlgorithmKind::dnnpso: return "dnnpso";
  }
  throw std::logic_error("unknown algorithm kind");
}

std::string AlgorithmSpecEntry::label() const {
  return kind_name() + "-p" + std::to_string(particles);
}

ExperimentPlan ExperimentPlan::desk_defaults() {
  ExperimentPlan plan;
  plan.groups = {{"E1", 100, 50}, {"E3", 200, 200}};
  plan.env_count = 2;
  plan.run_count = 2;
  plan.t_max = 2000;
  plan.algorithms = {{AlgorithmKind::pso, 5},
                     {AlgorithmKind::pso, 165},
                     {AlgorithmKind::cnnpso, 5},
                     {AlgorithmKind::dnnpso, 5},
                     {AlgorithmKind::dnnpso, 10}};
  return plan;
}

ExperimentPlan ExperimentPlan::full_defaults() {
  ExperimentPlan plan;
  plan.groups = {{"E1", 100, 50}, {"E2", 200, 100}, {"E3", 200, 200}, {"E4", 500, 100}};
  plan.env_count = 5;
  plan.run_count = 3;
  plan.t_max = 20000;
  plan.algorithms = {{AlgorithmKind::pso, 5},
                     {AlgorithmKind::pso, 165},
                     {AlgorithmKind::cnnpso, 5},
                     {AlgorithmKind::dnnpso, 5}};
  return plan;
}

void ExperimentPlan::validate() const {
  if (groups.empty()) throw std::invalid_argument("plan: no groups");
  if (algorithms.empty()) throw std::invalid_argument("plan: no algorithms");
  if (env_count < 1 || run_count < 1)
    throw std::invalid_argument("plan: env_count and run_count must be >= 1");
  if (t_max < 1) throw std::invalid_argument("plan: t_max must be >= 1");
  for (const GroupSpec& g : groups) {
    if (g.name.empty()) throw std::invalid_argument("plan: group without a name");
    if (g.peak_count < 1 || g.center_count < 1)
      throw std::invalid_argument("plan: groups need peaks and centers");
  }
  for (const AlgorithmSpecEntry& a : algorithms)
    if (a.particles < 1) throw std::invalid_argument("plan: particle counts must be >= 1");
  environment_spec(groups.front(), 0).validate();
}

std::uint64_t ExperimentPlan::env_seed(const GroupSpec& group, std::size_t env_index) const {
  return derive_seed(master_seed, "group/" + group.name + "/env/" + std::to_string(env_index));
}

std::uint64_t ExperimentPlan::run_seed(const GroupSpec& group, std::size_t env_index,
                                       std::size_t run_index,
                                       const AlgorithmSpecEntry& algo) const {
  return derive_seed(master_seed, "group/" + group.name + "/env/" +
                                      std::to_string(env_index) + "/run/" +
                                      std::to_string(run_index) + "/algo/" + algo.label());
}

EnvironmentSpec ExperimentPlan::environment_spec(const GroupSpec& group,
                                                 std::size_t env_index) const {
  EnvironmentSpec spec;
  spec.e_bound = e_bound;
  spec.e_factor = e_factor;
  spec.peak_count = group.peak_count;
  spec.center_count = group.center_count;
  spec.sigma_min = sigma_min;
  spec.sigma_max = sigma_max;
  spec.omega = effective_omega();
  spec.t_max = t_max;
  spec.seed = env_seed(group, env_index);
  return spec;
}

std::filesystem::path ExperimentPlan::env_path(const GroupSpec& g, std::size_t j) const {
  return output_dir / "envs" / (g.name + "_e" + std::to_string(j) + ".json");
}

std::filesystem::path ExperimentPlan::oracle_path(const GroupSpec& g, std::size_t j) const {
  return output_dir / "oracle" / (g.name + "_e" + std::to_string(j) + ".csv");
}

std::filesystem::path ExperimentPlan::run_path(const AlgorithmSpecEntry& a, const GroupSpec& g,
                                               std::size_t j, std::size_t k) const {
  return output_dir / "runs" / a.label() /
         (g.name + "_e" + std::to_string(j) + "_r" + std::to_string(k) + ".csv");
}

namespace {

AlgorithmKind kind_from_name(const std::string& name) {
  if (name == "pso") return AlgorithmKind::pso;
  if (name == "cnnpso") return AlgorithmKind::cnnpso;
  if (name == "dnnpso") return AlgorithmKind::dnnpso;
  throw std::runtime_error("plan names unknown algorithm: " + name);
}

}  // namespace

std::string ExperimentPlan::to_json_string() const {
  nlohmann::json j;
  j["format"] = "nngpso-plan-v1";
  j["master_seed"] = master_seed;
  j["output_dir"] = output_dir.string();
  j["t_max"] = t_max;
  j["omega"] = omega;
  j["e_bound"] = e_bound;
  j["e_factor"] = e_factor;
  j["sigma_min"] = sigma_min;
  j["sigma_max"] = sigma_max;
  j["env_count"] = env_count;
  j["run_count"] = run_count;
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupSpec& g : this->groups)
    groups.push_back(
        {{"name", g.name}, {"peak_count", g.peak_count}, {"center_count", g.center_count}});
  j["groups"] = std::move(groups);
  nlohmann::json algos = nlohmann::json::array();
  for (const AlgorithmSpecEntry& a : algorithms)
    algos.push_back({{"variant", a.kind_name()}, {"particles", a.particles}});
  j["algorithms"] = std::move(algos);
  return j.dump(2) + "\n";
}

ExperimentPlan ExperimentPlan::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != std::string("nngpso-plan-v1"))
    throw std::runtime_error("unrecognized plan file format");
  ExperimentPlan plan;
  plan.master_seed = j.at("master_seed").get<std::uint64_t>();
  plan.output_dir = j.at("output_dir").get<std::string>();
  plan.t_max = j.at("t_max").get<std::int64_t>();
  plan.omega = j.value("omega", 0.0);
  plan.e_bound = j.value("e_bound", 10.0);
  plan.e_factor = j.value("e_factor", 0.8);
  plan.sigma_min = j.value("sigma_min", 0.25);
  plan.sigma_max = j.value("sigma_max", 1.0);
  plan.env_count = j.at("env_count").get<std::size_t>();
  plan.run_count = j.at("run_count").get<std::size_t>();
  plan.groups.clear();
  for (const auto& g : j.at("groups"))
    plan.groups.push_back({g.at("name").get<std::string>(),
                           g.at("peak_count").get<std::size_t>(),
                           g.at("center_count").get<std::size_t>()});
  plan.algorithms.clear();
  for (const auto& a : j.at("algorithms"))
    plan.algorithms.push_back(
        {kind_from_name(a.at("variant").get<std::string>()), a.at("particles").get<std::size_t>()});
  plan.validate();
  return plan;
}

void ExperimentPlan::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json_string());
}

ExperimentPlan ExperimentPlan::load(const std::filesystem::path& path) {
  return from_json_string(read_text_file(path));
}

std::filesystem::path cnnpso_weight_path(const std::filesystem::path& dir) {
  return dir / "cnnpso.json";
}

std::filesystem::path dnnpso_weight_path(const std::filesystem::path& dir, std::size_t index) {
  return dir / ("dnnpso_" + two_digits(index) + ".json");
}

void pretrain_weights(const PretrainJob& job) {
  job.cfg.validate();
  std::filesystem::create_directories(job.weights_dir);
  std::filesystem::path cache_dir = job.weights_dir / "oracle-cache";
  std::filesystem::create_directories(cache_dir);

  auto train_one = [&](const std::filesystem::path& weight_path,
                       const std::filesystem::path& loss_path, const std::string& tag) {
    if (std::filesystem::exists(weight_path)) {
      if (job.verbose) std::printf("[pretrain] %s: weights exist, skipping\n", tag.c_str());
      return;
    }
    auto start = std::chrono::steady_clock::now();
    std::uint64_t net_seed = derive_seed(job.seed, "net/" + tag);
    Rng init_rng(derive_seed(net_seed, "he-init"));
    MlpConfig config =
        MlpConfig::tracker(static_cast<int>(job.cfg.observation.point_count()));
    Mlp net = Mlp::init_he(config, init_rng);
    PretrainOptions opts{job.cfg, net_seed, cache_dir, job.threads};
    PretrainReport report = pretrain_network(net, opts);
    net.save(weight_path);
    save_loss_history(loss_path, report);
    if (job.verbose)
      std::printf("[pretrain] %s: %d repeats x %d epochs in %.1fs\n", tag.c_str(),
                  job.cfg.repeats, job.cfg.epochs, elapsed_s(start));
  };

  if (job.train_cnnpso)
    train_one(cnnpso_weight_path(job.weights_dir), job.weights_dir / "loss_cnnpso.csv",
              "cnnpso/0");
  for (std::size_t i = 0; i < job.dnnpso_count; ++i)
    train_one(dnnpso_weight_path(job.weights_dir, i),
              job.weights_dir / ("loss_dnnpso_" + two_digits(i) + ".csv"),
              "dnnpso/" + std::to_string(i));
}

namespace {

std::vector<Mlp> load_networks(const AlgorithmSpecEntry& algo,
                               const std::filesystem::path& weights_dir) {
  std::vector<Mlp> nets;
  if (algo.kind == AlgorithmKind::cnnpso) {
    auto path = cnnpso_weight_path(weights_dir);
    if (!std::filesystem::exists(path))
      throw std::runtime_error("missing pre-trained weights: " + path.string());
    nets.push_back(Mlp::load(path));
  } else if (algo.kind == AlgorithmKind::dnnpso) {
    for (std::size_t i = 0; i < algo.particles; ++i) {
      auto path = dnnpso_weight_path(weights_dir, i);
      if (!std::filesystem::exists(path))
        throw std::runtime_error("missing pre-trained weights: " + path.string());
      nets.push_back(Mlp::load(path));
    }
  }
  return nets;
}

std::vector<RunStep> zip_history(std::span<const GlobalBest> history,
                                 const OracleTrace& oracle) {
  std::vector<RunStep> steps(history.size());
  for (std::size_t t = 0; t < history.size(); ++t) {
    const OracleEntry& truth = oracle.at(static_cast<std::int64_t>(t));
    steps[t] = {static_cast<std::int64_t>(t), history[t].position, history[t].utility,
                truth.position, truth.utility};
  }
  return steps;
}

std::vector<RunStep> zip_history(std::span<const BestEntry> history,
                                 const OracleTrace& oracle) {
  std::vector<RunStep> steps(history.size());
  for (std::size_t t = 0; t < history.size(); ++t) {
    const OracleEntry& truth = oracle.at(static_cast<std::int64_t>(t));
    steps[t] = {static_cast<std::int64_t>(t), history[t].position, history[t].utility,
                truth.position, truth.utility};
  }
  return steps;
}

}  // namespace

void run_plan(const ExperimentPlan& plan, const RunPlanOptions& options) {
  plan.validate();
  std::filesystem::create_directories(plan.output_dir);
  plan.save(plan.output_dir / "plan.json");

  // Weights are checked up front so a misconfigured plan fails before the
  // expensive oracle phase.
  if (!options.oracle_only)
    for (const AlgorithmSpecEntry& algo : plan.algorithms) (void)load_networks(algo, options.weights_dir);

  for (const GroupSpec& group : plan.groups) {
    for (std::size_t j = 0; j < plan.env_count; ++j) {
      auto env_file = plan.env_path(group, j);
      Environment env = [&] {
        if (std::filesystem::exists(env_file)) return Environment::load(env_file);
        Environment fresh = generate_environment(plan.environment_spec(group, j));
        fresh.save(env_file);
        return fresh;
      }();

      auto oracle_file = plan.oracle_path(group, j);
      OracleTrace oracle;
      if (std::filesystem::exists(oracle_file)) {
        oracle = OracleTrace::load(oracle_file);
      } else {
        auto start = std::chrono::steady_clock::now();
        oracle = compute_oracle_trace(env, derive_seed(env.spec().seed, "oracle"),
                                      options.threads);
        oracle.save(oracle_file);
        if (options.verbose)
          std::printf("[oracle] %s env %zu: %lld states in %.1fs\n", group.name.c_str(), j,
                      static_cast<long long>(plan.t_max), elapsed_s(start));
      }
      if (options.oracle_only) continue;

      for (const AlgorithmSpecEntry& algo : plan.algorithms) {
        for (std::size_t k = 0; k < plan.run_count; ++k) {
          auto run_file = plan.run_path(algo, group, j, k);
          if (std::filesystem::exists(run_file)) continue;
          Rng swarm_rng(plan.run_seed(group, j, k, algo));
          std::vector<RunStep> steps;
          if (algo.kind == AlgorithmKind::pso) {
            PsoParams params;  // w=0.1, c1=c2=2
            auto history = run_baseline_tracker(params, algo.particles, env, swarm_rng);
            steps = zip_history(history, oracle);
          } else {
            AlgorithmConfig cfg;
            cfg.variant = algo.kind == AlgorithmKind::cnnpso ? SwarmVariant::centralized
                                                             : SwarmVariant::distributed;
            cfg.particle_count = algo.particles;
            auto history =
                run_experiment(cfg, env, load_networks(algo, options.weights_dir), swarm_rng);
            steps = zip_history(history, oracle);
          }
          save_run_record(run_file, steps);
        }
        if (options.verbose)
          std::printf("[run] %s %s env %zu: %zu runs done\n", algo.label().c_str(),
                      group.name.c_str(), j, plan.run_count);
      }
    }
  }
}

namespace {

struct CellErrors {
  std::vector<MeanSd> env_stats;  // one per environment with complete runs
};

CellErrors collect_errors(const ExperimentPlan& plan, const AlgorithmSpecEntry& algo,
                          const GroupSpec& group) {
  CellErrors cell;
  for (std::size_t j = 0; j < plan.env_count; ++j) {
    std::vector<double> errors;
    for (std::size_t k = 0; k < plan.run_count; ++k) {
      auto path = plan.run_path(algo, group, j, k);
      if (!std::filesystem::exists(path)) continue;
      auto steps = load_run_record(path);
      errors.push_back(tracking_error(steps));
    }
    if (!errors.empty()) cell.env_stats.push_back(aggregate_env(errors));
  }
  return cell;
}

}  // namespace

std::vector<SummaryRow> emit_report(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<SummaryRow> rows;
  for (const AlgorithmSpecEntry& algo : plan.algorithms) {
    SummaryRow row;
    row.algorithm = algo.kind_name();
    row.particles = algo.particles;
    std::vector<MeanSd> pooled;
    for (const GroupSpec& group : plan.groups) {
      CellErrors cell = collect_errors(plan, algo, group);
      GroupStat stat;
      stat.group = group.name;
      if (!cell.env_stats.empty()) {
        stat.stat = aggregate_group(cell.env_stats);
        stat.present = true;
        pooled.insert(pooled.end(), cell.env_stats.begin(), cell.env_stats.end());
      }
      row.groups.push_back(std::move(stat));
    }
    if (!pooled.empty()) {
      row.aggregate = aggregate_group(pooled);
      row.aggregate_present = true;
    }
    rows.push_back(std::move(row));
  }

  auto report_dir = plan.output_dir / "report";
  std::filesystem::create_directories(report_dir);
  save_summary_csv(report_dir / "summary.csv", rows, plan.t_max);
  save_summary_json(report_dir / "summary.json", rows, plan.t_max);

  // Plot-ready per-run traces: (t, util_a, util_g).
  for (const AlgorithmSpecEntry& algo : plan.algorithms) {
    for (const GroupSpec& group : plan.groups) {
      for (std::size_t j = 0; j < plan.env_count; ++j) {
        for (std::size_t k = 0; k < plan.run_count; ++k) {
          auto path = plan.run_path(algo, group, j, k);
          if (!std::filesystem::exists(path)) continue;
          auto steps = load_run_record(path);
          std::string out = "t,util_a,util_g\n";
          for (const RunStep& s : steps) {
            out += std::to_string(s.t);
            out += ',';
            out += format_double(s.util_a);
            out += ',';
            out += format_double(s.util_g);
            out += '\n';
          }
          auto trace_path = report_dir / "traces" / algo.label() /
                            (group.name + "_e" + std::to_string(j) + "_r" +
                             std::to_string(k) + ".csv");
          write_text_file(trace_path, out);
        }
      }
    }
  }
  return rows;
}

MeanSd pooled_aggregate(const ExperimentPlan& plan, const AlgorithmSpecEntry& algo) {
  std::vector<MeanSd> pooled;
  for (const GroupSpec& group : plan.groups) {
    CellErrors cell = collect_errors(plan, algo, group);
    pooled.insert(pooled.end(), cell.env_stats.begin(), cell.env_stats.end());
  }
  if (pooled.empty()) throw std::runtime_error("no results for " + algo.label());
  return aggregate_group(pooled);
}

}  // namespace nngpso
