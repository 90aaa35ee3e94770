#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nngpso/geometry.hpp"

namespace nngpso {

/// One timestep of a finished run: the swarm's detected best (with the
/// utility it had stored at record time) against the oracle's true optimum.
struct RunStep {
  std::int64_t t = 0;
  Vec2 g;
  double util_g = 0.0;
  Vec2 a;
  double util_a = 0.0;
};

/// Penalty weight: 1 while the stored best utility does not exceed the true
/// optimum's, 1.5 once the swarm holds on to a value the landscape no longer
/// supports.
double lambda_weight(const RunStep& step);

/// Weighted cumulative tracking error: sum of lambda(t) * |g(t) - a(t)|.
double tracking_error(std::span<const RunStep> steps);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and population standard deviation of per-run errors (divisor = run
/// count).
MeanSd aggregate_env(std::span<const double> run_errors);

/// Group aggregation over per-environment statistics:
///   mean = average of environment means
///   sd   = sqrt(mean of (sd_env^2 + (mean_env - mean)^2))
MeanSd aggregate_group(std::span<const MeanSd> env_stats);

/// Run trace CSV: one row per timestep with derived distance and lambda
/// columns for plotting convenience. The loader reads the raw fields and
/// ignores the derived ones.
void save_run_record(const std::filesystem::path& path, std::span<const RunStep> steps);
std::vector<RunStep> load_run_record(const std::filesystem::path& path);

/// A summary table cell; absent cells stay blank in reports rather than
/// being fabricated.
struct GroupStat {
  std::string group;
  MeanSd stat;
  bool present = false;
};

struct SummaryRow {
  std::string algorithm;
  std::size_t particles = 0;
  std::vector<GroupStat> groups;
  MeanSd aggregate;
  bool aggregate_present = false;
};

/// Comparison-table writers: one row per algorithm, per-group mean +/- SD
/// columns and the pooled aggregate. Raw cumulative errors plus per-step
/// normalizations (divided by t_max) are both emitted.
void save_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows,
                      std::int64_t t_max);
void save_summary_json(const std::filesystem::path& path, std::span<const SummaryRow> rows,
                       std::int64_t t_max);

}  // namespace nngpso
