#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nngpso/metrics.hpp"
#include "nngpso/pretrainer.hpp"

namespace nngpso {

enum class AlgorithmKind { pso, cnnpso, dnnpso };

struct AlgorithmSpecEntry {
  AlgorithmKind kind = AlgorithmKind::pso;
  std::size_t particles = 5;

  std::string label() const;  // e.g. "dnnpso-p5"; used in paths and reports
  std::string kind_name() const;
};

struct GroupSpec {
  std::string name;  // e.g. "E1"
  std::size_t peak_count = 0;
  std::size_t center_count = 0;
};

/// The experiment matrix: groups x environments x runs x algorithms, all
/// derived deterministically from one master seed. Every algorithm sees the
/// same environment realizations; only environment and oracle files are
/// shared between algorithms.
struct ExperimentPlan {
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "out";
  std::vector<GroupSpec> groups;
  std::size_t env_count = 2;  // environments per group
  std::size_t run_count = 2;  // runs per environment per algorithm
  std::int64_t t_max = 2000;
  double omega = 0.0;  // 0: defaults to t_max
  double e_bound = 10.0;
  double e_factor = 0.8;
  double sigma_min = 0.25;
  double sigma_max = 1.0;
  std::vector<AlgorithmSpecEntry> algorithms;

  /// Reduced-scale defaults: groups E1 and E3, t_max 2000, 2 environments x
  /// 2 runs; full scale swaps in all four groups at t_max 20000 with 5 x 3
  /// cells (oracle precomputation dominates the cost there).
  static ExperimentPlan desk_defaults();
  static ExperimentPlan full_defaults();

  void validate() const;
  double effective_omega() const { return omega > 0.0 ? omega : static_cast<double>(t_max); }

  std::string to_json_string() const;
  static ExperimentPlan from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ExperimentPlan load(const std::filesystem::path& path);

  // Derived per-cell seeds; algorithm-independent for environments so adding
  // algorithms never perturbs existing cells.
  std::uint64_t env_seed(const GroupSpec& group, std::size_t env_index) const;
  std::uint64_t run_seed(const GroupSpec& group, std::size_t env_index, std::size_t run_index,
                         const AlgorithmSpecEntry& algo) const;

  EnvironmentSpec environment_spec(const GroupSpec& group, std::size_t env_index) const;

  // Result-tree layout.
  std::filesystem::path env_path(const GroupSpec& g, std::size_t j) const;
  std::filesystem::path oracle_path(const GroupSpec& g, std::size_t j) const;
  std::filesystem::path run_path(const AlgorithmSpecEntry& a, const GroupSpec& g,
                                 std::size_t j, std::size_t k) const;
};

/// Weight-file naming inside a weights directory.
std::filesystem::path cnnpso_weight_path(const std::filesystem::path& dir);
std::filesystem::path dnnpso_weight_path(const std::filesystem::path& dir, std::size_t index);

struct PretrainJob {
  std::filesystem::path weights_dir;
  PretrainConfig cfg;
  std::uint64_t seed = 1;
  bool train_cnnpso = true;
  std::size_t dnnpso_count = 10;
  std::size_t threads = 1;
  bool verbose = true;
};

/// Trains and saves the shared centralized network and `dnnpso_count`
/// distributed networks, each from its own seed stream with disjoint
/// pre-training environments. Existing weight files are kept, so the job is
/// resumable. Loss histories are written next to the weights.
void pretrain_weights(const PretrainJob& job);

struct RunPlanOptions {
  std::filesystem::path weights_dir;
  std::size_t threads = 1;
  bool verbose = true;
  bool oracle_only = false;  // stop after environments and oracle traces
};

/// Executes the plan: per (group, environment) one environment file and one
/// oracle trace (computed once, shared by every algorithm), then one run
/// record CSV per (algorithm, run). Existing files are reused, so partial
/// results resume. Throws if NNGPSO weight files are missing.
void run_plan(const ExperimentPlan& plan, const RunPlanOptions& options);

/// Aggregates run records into the comparison table (summary.csv /
/// summary.json under <output_dir>/report) and writes per-run utility traces
/// (t, util_a, util_g) for plotting. Missing cells stay blank.
std::vector<SummaryRow> emit_report(const ExperimentPlan& plan);

/// Pooled aggregate (mean over everything the plan produced for `algo`)
/// straight from the result tree; used by comparisons across plans.
MeanSd pooled_aggregate(const ExperimentPlan& plan, const AlgorithmSpecEntry& algo);

}  // namespace nngpso
