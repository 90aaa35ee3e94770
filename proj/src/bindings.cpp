#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nngpso/bench.hpp"
#include "nngpso/env_model.hpp"
#include "nngpso/metrics.hpp"
#include "nngpso/neural_core.hpp"
#include "nngpso/nngpso_swarm.hpp"
#include "nngpso/parallel.hpp"
#include "nngpso/pretrainer.hpp"
#include "nngpso/pso_canonical.hpp"
#include "nngpso/rng.hpp"

namespace py = pybind11;
using namespace nngpso;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Neural-network-guided PSO: dynamic landscapes, trackers, and metrics";

  m.def("derive_seed", py::overload_cast<std::uint64_t, std::string_view>(&derive_seed));
  m.def("default_thread_count", &default_thread_count);

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>())
      .def("uniform01", &Rng::uniform01)
      .def("uniform", &Rng::uniform)
      .def("normal", &Rng::normal)
      .def("coin", &Rng::coin);

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init<double, double>())
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("norm", &Vec2::norm)
      .def("__repr__", [](const Vec2& v) {
        return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
      });

  py::class_<Peak>(m, "Peak")
      .def_readonly("mu", &Peak::mu)
      .def_readonly("sigma", &Peak::sigma)
      .def_readonly("center_index", &Peak::center_index)
      .def_readonly("initial_distance", &Peak::initial_distance);

  py::class_<EnvironmentSpec>(m, "EnvironmentSpec")
      .def(py::init<>())
      .def_readwrite("e_bound", &EnvironmentSpec::e_bound)
      .def_readwrite("e_factor", &EnvironmentSpec::e_factor)
      .def_readwrite("peak_count", &EnvironmentSpec::peak_count)
      .def_readwrite("center_count", &EnvironmentSpec::center_count)
      .def_readwrite("sigma_min", &EnvironmentSpec::sigma_min)
      .def_readwrite("sigma_max", &EnvironmentSpec::sigma_max)
      .def_readwrite("omega", &EnvironmentSpec::omega)
      .def_readwrite("t_max", &EnvironmentSpec::t_max)
      .def_readwrite("seed", &EnvironmentSpec::seed)
      .def("validate", &EnvironmentSpec::validate);

  py::class_<Environment>(m, "Environment")
      .def_property_readonly("spec", &Environment::spec)
      .def_property_readonly("t", &Environment::t)
      .def_property_readonly("peaks", &Environment::peaks)
      .def_property_readonly("centers", &Environment::centers)
      .def("utility", &Environment::utility)
      .def("utility_batch",
           [](const Environment& env, const std::vector<Vec2>& pts) {
             std::vector<double> out(pts.size());
             env.utility_batch(pts, out);
             return out;
           })
      .def("max_possible_utility", &Environment::max_possible_utility)
      .def("step_peaks", &Environment::step_peaks)
      .def("save", &Environment::save)
      .def_static("load", &Environment::load);

  m.def("generate_environment",
        py::overload_cast<const EnvironmentSpec&>(&generate_environment));
  m.def("generate_environment",
        py::overload_cast<const EnvironmentSpec&, Rng&>(&generate_environment));
  m.def("motion_rng", &motion_rng);
  m.def("step_toward", &step_toward);

  py::class_<PsoParams>(m, "PsoParams")
      .def(py::init<>())
      .def_readwrite("w", &PsoParams::w)
      .def_readwrite("c1", &PsoParams::c1)
      .def_readwrite("c2", &PsoParams::c2);

  py::class_<BestEntry>(m, "BestEntry")
      .def_readonly("position", &BestEntry::position)
      .def_readonly("utility", &BestEntry::utility);

  m.def("find_static_optimum", &find_static_optimum);
  m.def("run_baseline_tracker", &run_baseline_tracker);

  py::class_<OracleEntry>(m, "OracleEntry")
      .def_readonly("t", &OracleEntry::t)
      .def_readonly("position", &OracleEntry::position)
      .def_readonly("utility", &OracleEntry::utility);

  py::class_<OracleTrace>(m, "OracleTrace")
      .def(py::init<>())
      .def_readonly("entries", &OracleTrace::entries)
      .def("at", &OracleTrace::at, py::return_value_policy::reference_internal)
      .def("save", &OracleTrace::save)
      .def_static("load", &OracleTrace::load);

  m.def("compute_oracle_trace", &compute_oracle_trace, py::arg("env"), py::arg("seed"),
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<MlpConfig>(m, "MlpConfig")
      .def(py::init<>())
      .def_readwrite("layer_sizes", &MlpConfig::layer_sizes)
      .def_static("tracker", &MlpConfig::tracker);

  py::class_<TrainingSample>(m, "TrainingSample")
      .def(py::init<>())
      .def(py::init([](std::vector<double> input, std::vector<double> target) {
             return TrainingSample{std::move(input), std::move(target)};
           }))
      .def_readwrite("input", &TrainingSample::input)
      .def_readwrite("target", &TrainingSample::target);

  py::class_<LrSchedule>(m, "LrSchedule")
      .def(py::init([](double alpha_start, double alpha_warm, double alpha_final,
                       std::int64_t warmup_steps, std::int64_t total_steps) {
             LrSchedule s{alpha_start, alpha_warm, alpha_final, warmup_steps, total_steps};
             s.validate();
             return s;
           }),
           py::arg("alpha_start"), py::arg("alpha_warm"), py::arg("alpha_final"),
           py::arg("warmup_steps"), py::arg("total_steps"))
      .def("lr_at", &LrSchedule::lr_at);

  py::class_<Mlp>(m, "Mlp")
      .def(py::init<MlpConfig>())
      .def_static("init_he", &Mlp::init_he)
      .def_property_readonly("step_count", &Mlp::step_count)
      .def("forward",
           [](const Mlp& net, const std::vector<double>& input) { return net.forward(input); })
      .def("train_batch",
           [](Mlp& net, const std::vector<TrainingSample>& batch, double lr) {
             return net.train_batch(batch, lr);
           })
      .def("parameter_count", &Mlp::parameter_count)
      .def("get_parameter", &Mlp::get_parameter)
      .def("set_parameter", &Mlp::set_parameter)
      .def("save", &Mlp::save)
      .def_static("load", &Mlp::load);

  py::class_<ObservationConfig>(m, "ObservationConfig")
      .def(py::init<>())
      .def_static("standard", &ObservationConfig::standard)
      .def_readwrite("directions", &ObservationConfig::directions)
      .def_readwrite("base_radii", &ObservationConfig::base_radii)
      .def_readwrite("m_fac", &ObservationConfig::m_fac)
      .def_readwrite("gamma_min", &ObservationConfig::gamma_min)
      .def_readwrite("gamma_max", &ObservationConfig::gamma_max)
      .def("point_count", &ObservationConfig::point_count)
      .def("input_size", &ObservationConfig::input_size);

  py::class_<NngParticle>(m, "NngParticle")
      .def(py::init<>())
      .def_readwrite("position", &NngParticle::position)
      .def_readwrite("current_utility", &NngParticle::current_utility)
      .def_readwrite("ring_multiplier", &NngParticle::ring_multiplier)
      .def_readwrite("counter", &NngParticle::counter);

  py::enum_<SwarmVariant>(m, "SwarmVariant")
      .value("centralized", SwarmVariant::centralized)
      .value("distributed", SwarmVariant::distributed);

  py::class_<AlgorithmConfig>(m, "AlgorithmConfig")
      .def(py::init<>())
      .def_readwrite("variant", &AlgorithmConfig::variant)
      .def_readwrite("particle_count", &AlgorithmConfig::particle_count)
      .def_readwrite("tau_epoch_centralized", &AlgorithmConfig::tau_epoch_centralized)
      .def_readwrite("tau_epoch_distributed", &AlgorithmConfig::tau_epoch_distributed)
      .def_readwrite("online_lr", &AlgorithmConfig::online_lr)
      .def_readwrite("observation", &AlgorithmConfig::observation);

  py::class_<GlobalBest>(m, "GlobalBest")
      .def_readonly("position", &GlobalBest::position)
      .def_readonly("utility", &GlobalBest::utility);

  m.def("observation_points", &observation_points);
  m.def("build_input", [](const NngParticle& p, const std::vector<Vec2>& points,
                          const Environment& env) { return build_input(p, points, env); });
  m.def("predict_next", [](const Mlp& net, const std::vector<double>& input,
                           double e_bound) { return predict_next(net, input, e_bound); });
  m.def("update_ring", &update_ring);
  m.def("run_experiment",
        [](const AlgorithmConfig& cfg, const Environment& env, const std::vector<Mlp>& nets,
           Rng& rng) { return run_experiment(cfg, env, nets, rng); },
        py::call_guard<py::gil_scoped_release>());

  py::class_<PretrainConfig>(m, "PretrainConfig")
      .def(py::init<>())
      .def_readwrite("peak_counts", &PretrainConfig::peak_counts)
      .def_readwrite("center_counts", &PretrainConfig::center_counts)
      .def_readwrite("t_max", &PretrainConfig::t_max)
      .def_readwrite("batch_size", &PretrainConfig::batch_size)
      .def_readwrite("epochs", &PretrainConfig::epochs)
      .def_readwrite("repeats", &PretrainConfig::repeats);

  m.def("collect_dataset",
        [](const Environment& env, const Mlp& net, const OracleTrace& oracle,
           const ObservationConfig& observation, Rng& rng) {
          return collect_dataset(env, net, oracle, observation, rng);
        });
  m.def("train_on_dataset",
        [](Mlp& net, std::vector<TrainingSample> dataset, const PretrainConfig& cfg,
           Rng& rng) { return train_on_dataset(net, std::move(dataset), cfg, rng); });

  py::class_<RunStep>(m, "RunStep")
      .def(py::init([](std::int64_t t, Vec2 g, double util_g, Vec2 a, double util_a) {
             return RunStep{t, g, util_g, a, util_a};
           }),
           py::arg("t"), py::arg("g"), py::arg("util_g"), py::arg("a"), py::arg("util_a"))
      .def_readwrite("t", &RunStep::t)
      .def_readwrite("g", &RunStep::g)
      .def_readwrite("util_g", &RunStep::util_g)
      .def_readwrite("a", &RunStep::a)
      .def_readwrite("util_a", &RunStep::util_a);

  py::class_<MeanSd>(m, "MeanSd")
      .def_readonly("mean", &MeanSd::mean)
      .def_readonly("sd", &MeanSd::sd);

  m.def("lambda_weight", &lambda_weight);
  m.def("tracking_error",
        [](const std::vector<RunStep>& steps) { return tracking_error(steps); });
  m.def("aggregate_env",
        [](const std::vector<double>& errors) { return aggregate_env(errors); });
  m.def("aggregate_group",
        [](const std::vector<MeanSd>& stats) { return aggregate_group(stats); });

  py::enum_<AlgorithmKind>(m, "AlgorithmKind")
      .value("pso", AlgorithmKind::pso)
      .value("cnnpso", AlgorithmKind::cnnpso)
      .value("dnnpso", AlgorithmKind::dnnpso);

  py::class_<AlgorithmSpecEntry>(m, "AlgorithmSpecEntry")
      .def(py::init<>())
      .def_readwrite("kind", &AlgorithmSpecEntry::kind)
      .def_readwrite("particles", &AlgorithmSpecEntry::particles)
      .def("label", &AlgorithmSpecEntry::label);

  py::class_<GroupSpec>(m, "GroupSpec")
      .def(py::init<>())
      .def_readwrite("name", &GroupSpec::name)
      .def_readwrite("peak_count", &GroupSpec::peak_count)
      .def_readwrite("center_count", &GroupSpec::center_count);

  py::class_<ExperimentPlan>(m, "ExperimentPlan")
      .def(py::init<>())
      .def_static("desk_defaults", &ExperimentPlan::desk_defaults)
      .def_static("full_defaults", &ExperimentPlan::full_defaults)
      .def_readwrite("master_seed", &ExperimentPlan::master_seed)
      .def_readwrite("output_dir", &ExperimentPlan::output_dir)
      .def_readwrite("groups", &ExperimentPlan::groups)
      .def_readwrite("env_count", &ExperimentPlan::env_count)
      .def_readwrite("run_count", &ExperimentPlan::run_count)
      .def_readwrite("t_max", &ExperimentPlan::t_max)
      .def_readwrite("algorithms", &ExperimentPlan::algorithms)
      .def("validate", &ExperimentPlan::validate)
      .def("save", &ExperimentPlan::save)
      .def_static("load", &ExperimentPlan::load);

  py::class_<PretrainJob>(m, "PretrainJob")
      .def(py::init<>())
      .def_readwrite("weights_dir", &PretrainJob::weights_dir)
      .def_readwrite("cfg", &PretrainJob::cfg)
      .def_readwrite("seed", &PretrainJob::seed)
      .def_readwrite("train_cnnpso", &PretrainJob::train_cnnpso)
      .def_readwrite("dnnpso_count", &PretrainJob::dnnpso_count)
      .def_readwrite("threads", &PretrainJob::threads)
      .def_readwrite("verbose", &PretrainJob::verbose);

  py::class_<RunPlanOptions>(m, "RunPlanOptions")
      .def(py::init<>())
      .def_readwrite("weights_dir", &RunPlanOptions::weights_dir)
      .def_readwrite("threads", &RunPlanOptions::threads)
      .def_readwrite("verbose", &RunPlanOptions::verbose)
      .def_readwrite("oracle_only", &RunPlanOptions::oracle_only);

  m.def("pretrain_weights", &pretrain_weights, py::call_guard<py::gil_scoped_release>());
  m.def("run_plan", &run_plan, py::call_guard<py::gil_scoped_release>());
  m.def("emit_report", &emit_report);
  m.def("pooled_aggregate", &pooled_aggregate);
}
