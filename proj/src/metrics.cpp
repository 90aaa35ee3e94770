#include "nngpso/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "nngpso/io.hpp"
#include "json.hpp"

namespace nngpso {

double lambda_weight(const RunStep& step) { return step.util_g <= step.util_a ? 1.0 : 1.5; }

double tracking_error(std::span<const RunStep> steps) {
  double sum = 0.0;
  for (const RunStep& s : steps) sum += lambda_weight(s) * distance(s.g, s.a);
  return sum;
}

MeanSd aggregate_env(std::span<const double> run_errors) {
  if (run_errors.empty()) throw std::invalid_argument("aggregate_env: no runs");
  const double n = static_cast<double>(run_errors.size());
  double mean = 0.0;
  for (double e : run_errors) mean += e;
  mean /= n;
  double var = 0.0;
  for (double e : run_errors) var += (e - mean) * (e - mean);
  var /= n;  // population variance, matching the explicit 1/E_run divisor
  return {mean, std::sqrt(var)};
}

MeanSd aggregate_group(std::span<const MeanSd> env_stats) {
  if (env_stats.empty()) throw std::invalid_argument("aggregate_group: no environments");
  const double n = static_cast<double>(env_stats.size());
  double mean = 0.0;
  for (const MeanSd& s : env_stats) mean += s.mean;
  mean /= n;
  double var = 0.0;
  for (const MeanSd& s : env_stats)
    var += s.sd * s.sd + (s.mean - mean) * (s.mean - mean);
  var /= n;
  return {mean, std::sqrt(var)};
}

namespace {
constexpr std::string_view kRunHeader = "t,g_x,g_y,util_g,a_x,a_y,util_a,distance,lambda";
}

void save_run_record(const std::filesystem::path& path, std::span<const RunStep> steps) {
  std::string out{kRunHeader};
  out += '\n';
  for (const RunStep& s : steps) {
    out += std::to_string(s.t);
    out += ',';
    out += format_double(s.g.x);
    out += ',';
    out += format_double(s.g.y);
    out += ',';
    out += format_double(s.util_g);
    out += ',';
    out += format_double(s.a.x);
    out += ',';
    out += format_double(s.a.y);
    out += ',';
    out += format_double(s.util_a);
    out += ',';
    out += format_double(distance(s.g, s.a));
    out += ',';
    out += format_double(lambda_weight(s));
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<RunStep> load_run_record(const std::filesystem::path& path) {
  std::vector<RunStep> steps;
  for (const auto& row : read_csv(path, kRunHeader)) {
    if (row.size() != 9) throw std::runtime_error("bad run record row in " + path.string());
    RunStep s;
    s.t = parse_int(row[0]);
    s.g = {parse_double(row[1]), parse_double(row[2])};
    s.util_g = parse_double(row[3]);
    s.a = {parse_double(row[4]), parse_double(row[5])};
    s.util_a = parse_double(row[6]);
    steps.push_back(s);
  }
  return steps;
}

void save_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows,
                      std::int64_t t_max) {
  std::string out = "algorithm,particles,n";
  if (!rows.empty()) {
    for (const GroupStat& g : rows.front().groups) {
      out += ',' + g.group + "_mean," + g.group + "_sd";
    }
  }
  out += ",aggregate_mean,aggregate_sd,aggregate_mean_per_step,aggregate_sd_per_step\n";
  const double steps = static_cast<double>(t_max);
  for (const SummaryRow& row : rows) {
    out += row.algorithm;
    out += ',';
    out += std::to_string(row.particles);
    out += ',';  // species column stays blank for these algorithms
    for (const GroupStat& g : row.groups) {
      out += ',';
      if (g.present) out += format_double(g.stat.mean);
      out += ',';
      if (g.present) out += format_double(g.stat.sd);
    }
    out += ',';
    if (row.aggregate_present) out += format_double(row.aggregate.mean);
    out += ',';
    if (row.aggregate_present) out += format_double(row.aggregate.sd);
    out += ',';
    if (row.aggregate_present) out += format_double(row.aggregate.mean / steps);
    out += ',';
    if (row.aggregate_present) out += format_double(row.aggregate.sd / steps);
    out += '\n';
  }
  write_text_file(path, out);
}

void save_summary_json(const std::filesystem::path& path, std::span<const SummaryRow> rows,
                       std::int64_t t_max) {
  nlohmann::json j;
  j["format"] = "nngpso-summary-v1";
  j["t_max"] = t_max;
  nlohmann::json out_rows = nlohmann::json::array();
  for (const SummaryRow& row : rows) {
    nlohmann::json r;
    r["algorithm"] = row.algorithm;
    r["particles"] = row.particles;
    nlohmann::json groups = nlohmann::json::object();
    for (const GroupStat& g : row.groups) {
      if (g.present)
        groups[g.group] = {{"mean", g.stat.mean}, {"sd", g.stat.sd}};
      else
        groups[g.group] = nullptr;
    }
    r["groups"] = std::move(groups);
    if (row.aggregate_present) {
      r["aggregate"] = {{"mean", row.aggregate.mean},
                        {"sd", row.aggregate.sd},
                        {"mean_per_step", row.aggregate.mean / static_cast<double>(t_max)},
                        {"sd_per_step", row.aggregate.sd / static_cast<double>(t_max)}};
    } else {
      r["aggregate"] = nullptr;
    }
    out_rows.push_back(std::move(r));
  }
  j["rows"] = std::move(out_rows);
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace nngpso
