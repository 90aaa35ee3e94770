#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "nngpso/bench.hpp"
#include "nngpso/parallel.hpp"

namespace {

using namespace nngpso;

/// NNGPSO_OUT beats the plan/default; an explicit --out beats both.
void apply_output_dir(ExperimentPlan& plan, const std::string& cli_out) {
  if (const char* env = std::getenv("NNGPSO_OUT"); env && *env) plan.output_dir = env;
  if (!cli_out.empty()) plan.output_dir = cli_out;
}

struct PlanArgs {
  std::string plan_file;
  std::string out;
  bool full_scale = false;
  std::uint64_t master_seed = 0;  // 0: keep plan value
  std::int64_t t_max = 0;
  std::size_t env_count = 0;
  std::size_t run_count = 0;

  ExperimentPlan resolve() const {
    ExperimentPlan plan;
    if (!plan_file.empty()) {
      plan = ExperimentPlan::load(plan_file);
    } else if (full_scale) {
      plan = ExperimentPlan::full_defaults();
      std::fprintf(stderr,
                   "warning: full scale runs per-timestep optimum searches for %lld steps "
                   "per environment; expect hours of compute\n",
                   static_cast<long long>(plan.t_max));
    } else {
      plan = ExperimentPlan::desk_defaults();
    }
    if (master_seed != 0) plan.master_seed = master_seed;
    if (t_max != 0) plan.t_max = t_max;
    if (env_count != 0) plan.env_count = env_count;
    if (run_count != 0) plan.run_count = run_count;
    apply_output_dir(plan, out);
    plan.validate();
    return plan;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--plan", plan_file, "plan JSON file (defaults to the desk-scale plan)");
    cmd->add_option("--out", out, "output directory (overrides plan and NNGPSO_OUT)");
    cmd->add_flag("--full-scale", full_scale, "use the full-scale default plan");
    cmd->add_option("--master-seed", master_seed, "override the plan's master seed");
    cmd->add_option("--t-max", t_max, "override the plan's run length");
    cmd->add_option("--e-count", env_count, "override environments per group");
    cmd->add_option("--e-run", run_count, "override runs per environment");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural-network-guided PSO benchmark harness"};
  app.require_subcommand(1);
  std::size_t threads = default_thread_count();
  app.add_option("--threads", threads, "worker threads for oracle computation")
      ->capture_default_str();

  // pretrain
  auto* pretrain_cmd = app.add_subcommand("pretrain", "train and save tracker networks");
  std::string weights_dir = "weights";
  std::uint64_t pretrain_seed = 1;
  std::size_t dnnpso_count = 10;
  bool no_cnnpso = false;
  bool paper_scale = false;
  std::int64_t pretrain_t_max = 2000;
  int pretrain_repeats = 3;
  pretrain_cmd->add_option("--out", weights_dir, "weights directory")->capture_default_str();
  pretrain_cmd->add_option("--seed", pretrain_seed, "pre-training seed")->capture_default_str();
  pretrain_cmd->add_option("--dnnpso-nets", dnnpso_count, "distributed networks to train")
      ->capture_default_str();
  pretrain_cmd->add_flag("--no-cnnpso", no_cnnpso, "skip the shared centralized network");
  pretrain_cmd->add_option("--t-max", pretrain_t_max, "rollout length per repeat")
      ->capture_default_str();
  pretrain_cmd->add_option("--repeats", pretrain_repeats, "environments per network")
      ->capture_default_str();
  pretrain_cmd->add_flag("--paper-scale", paper_scale,
                         "use 10000-step rollouts (slow; overrides --t-max)");

  // oracle
  auto* oracle_cmd =
      app.add_subcommand("oracle", "precompute true-optimum traces for a plan");
  PlanArgs oracle_args;
  oracle_args.attach(oracle_cmd);

  // run
  auto* run_cmd = app.add_subcommand("run", "execute a plan end to end");
  PlanArgs run_args;
  run_args.attach(run_cmd);
  std::string run_weights = "weights";
  run_cmd->add_option("--weights", run_weights, "directory with pre-trained weights")
      ->capture_default_str();

  // report
  auto* report_cmd = app.add_subcommand("report", "aggregate results into summary tables");
  PlanArgs report_args;
  report_args.attach(report_cmd);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "write a plan template");
  std::string plan_out = "plan.json";
  bool plan_full = false;
  plan_cmd->add_option("--out", plan_out, "where to write the plan")->capture_default_str();
  plan_cmd->add_flag("--full-scale", plan_full, "write the full-scale plan");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pretrain_cmd->parsed()) {
      PretrainJob job;
      job.weights_dir = weights_dir;
      job.seed = pretrain_seed;
      job.train_cnnpso = !no_cnnpso;
      job.dnnpso_count = dnnpso_count;
      job.threads = threads;
      job.cfg.t_max = paper_scale ? 10000 : pretrain_t_max;
      job.cfg.repeats = pretrain_repeats;
      pretrain_weights(job);
    } else if (oracle_cmd->parsed()) {
      ExperimentPlan plan = oracle_args.resolve();
      RunPlanOptions options;
      options.threads = threads;
      options.oracle_only = true;
      run_plan(plan, options);
    } else if (run_cmd->parsed()) {
      ExperimentPlan plan = run_args.resolve();
      RunPlanOptions options;
      options.weights_dir = run_weights;
      options.threads = threads;
      run_plan(plan, options);
      emit_report(plan);
      std::printf("results in %s\n", plan.output_dir.string().c_str());
    } else if (report_cmd->parsed()) {
      ExperimentPlan plan = report_args.resolve();
      emit_report(plan);
      std::printf("report in %s\n", (plan.output_dir / "report").string().c_str());
    } else if (plan_cmd->parsed()) {
      ExperimentPlan plan =
          plan_full ? ExperimentPlan::full_defaults() : ExperimentPlan::desk_defaults();
      plan.save(plan_out);
      std::printf("wrote %s\n", plan_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
