#include "swarmid/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

#include "swarmid/io.hpp"

namespace swarmid {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const char* mode_name(ObjectiveMode m) { return m == ObjectiveMode::Stable ? "stable" : "faithful"; }

void require(bool present, const char* section, const char* command) {
  if (!present) throw ConfigError(std::string(command) + " needs a '" + section + "' section");
}

}  // namespace

PlanResult cmd_plan(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  require(cfg.constraints.has_value(), "constraints", "plan");
  require(cfg.planner.has_value(), "planner", "plan");
  const PlannerSettings& p = *cfg.planner;
  PsoConfig pso = p.pso;
  pso.seed = derive_seed(cfg.seed, SeedStream::Planner);

  const SearchBox box = default_planner_box(*cfg.constraints, p.frequency_limit);
  PlanResult r = plan_trajectory(*cfg.constraints, p.start, box, pso, p.excitation, p.duration);

  ordered_json j;
  j["trajectory"] = trajectory_to_json(r.trajectory);
  j["objective"] = r.objective;
  j["objective_mode"] = mode_name(p.excitation.mode);
  j["gram_determinant"] = gram_determinant(build_qsam(r.trajectory, p.excitation.samples));
  write_json(out / files::kTrajectory, j);
  write_trajectory_csv(out / files::kTrajectorySeries, r.trajectory, p.excitation.grid);
  std::vector<double> objective_history;
  for (double v : r.search.history) objective_history.push_back(-v);
  write_history_csv(out / files::kPlanHistory, objective_history);

  log << "planned trajectory: H_Q = " << format_number(r.objective) << " (" << mode_name(p.excitation.mode)
      << ")\nwrote " << (out / files::kTrajectory).string() << "\n";
  return r;
}

FourierTrajectory sampling_trajectory(const ExperimentConfig& cfg, const std::optional<fs::path>& trajectory_file,
                                      std::ostream& log) {
  if (trajectory_file) {
    const auto j = read_json(*trajectory_file);
    return trajectory_from_json(j.is_object() && j.contains("trajectory") ? j["trajectory"] : j);
  }
  if (cfg.trajectory) return *cfg.trajectory;
  if (cfg.planner) {
    require(cfg.constraints.has_value(), "constraints", "sample");
    PsoConfig pso = cfg.planner->pso;
    pso.seed = derive_seed(cfg.seed, SeedStream::Planner);
    log << "no trajectory given; planning one\n";
    return plan_trajectory(*cfg.constraints, cfg.planner->start,
                           default_planner_box(*cfg.constraints, cfg.planner->frequency_limit), pso,
                           cfg.planner->excitation, cfg.planner->duration)
        .trajectory;
  }
  throw ConfigError("sample needs a 'trajectory' or 'planner' section, or a trajectory file");
}

SampleSet cmd_sample(const ExperimentConfig& cfg, const fs::path& out, const std::optional<fs::path>& trajectory_file,
                     std::ostream& log) {
  require(cfg.robot.has_value(), "robot", "sample");
  require(cfg.true_params.has_value(), "true_params", "sample");
  require(cfg.sampling.has_value(), "sampling", "sample");
  const FourierTrajectory traj = sampling_trajectory(cfg, trajectory_file, log);
  if (traj.dof() != cfg.robot->dof())
    throw ConfigError("trajectory has " + std::to_string(traj.dof()) + " joints, robot has " +
                      std::to_string(cfg.robot->dof()));
  if (traj.duration != cfg.sampling->duration)
    throw ConfigError("trajectory duration " + format_number(traj.duration) + " does not match sampling.duration " +
                      format_number(cfg.sampling->duration));

  if (cfg.constraints) {
    const auto check = check_constraints(traj, *cfg.constraints, 10 * cfg.sampling->count);
    for (const Violation& v : check.violations) log << "warning: trajectory infeasible: " << describe(v) << "\n";
  }
  SampleSet s = generate_samples(*cfg.robot, *cfg.true_params, traj, cfg.sampling->count, cfg.sampling->noise_level,
                                 derive_seed(cfg.seed, SeedStream::Sampling));
  write_samples_csv(out / files::kSamples, s);
  log << "wrote " << s.size() << " samples to " << (out / files::kSamples).string() << "\n";
  return s;
}

namespace {

struct EstimationInputs {
  SampleSet samples;
  SearchBox box;
  EstimationOptions options;
  PsoConfig pso;
};

EstimationInputs estimation_inputs(const ExperimentConfig& cfg, const fs::path& samples, const char* command) {
  require(cfg.robot.has_value(), "robot", command);
  require(cfg.estimator.has_value(), "estimator", command);
  const std::size_t dof = cfg.robot->dof();
  EstimationInputs in;
  in.samples = read_samples_csv(samples, dof);
  in.box = cfg.estimator->box(dof);
  in.options = cfg.estimator->options(dof);
  in.pso = cfg.estimator->pso;
  in.pso.seed = derive_seed(cfg.seed, SeedStream::Estimator);
  return in;
}

}  // namespace

EstimationRun cmd_estimate(const ExperimentConfig& cfg, const fs::path& samples, const fs::path& out,
                           std::ostream& log) {
  const EstimationInputs in = estimation_inputs(cfg, samples, "estimate");
  EstimationRun run = estimate(*cfg.robot, in.samples, in.box, in.pso, in.options);
  write_json(out / files::kEstimate, run_to_json(run));
  write_history_csv(out / files::kHistory, run.history);
  log << "best cost " << format_number(run.best_cost) << "\nwrote " << (out / files::kEstimate).string() << "\n";
  return run;
}

EstimationReport cmd_classify(const ExperimentConfig& cfg, const fs::path& samples, const fs::path& out,
                              std::ostream& log) {
  require(cfg.classification.has_value(), "classification", "classify");
  const EstimationInputs in = estimation_inputs(cfg, samples, "classify");
  EstimationReport rep =
      classify(*cfg.robot, in.samples, in.box, in.pso, *cfg.classification, in.options, cfg.true_params);
  write_json(out / files::kReport, report_to_json(rep));
  write_report_csv(out / files::kReportCsv, rep);
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& r : rep.rows) ++counts[static_cast<int>(r.status)];
  log << rep.rows.size() << " parameters: " << counts[0] << " I, " << counts[1] << " SI/NUI, " << counts[2]
      << " UI\nwrote " << (out / files::kReport).string() << "\n";
  return rep;
}

Verification cmd_verify(const ExperimentConfig& cfg, const fs::path& estimate, const fs::path& out,
                        std::ostream& log) {
  require(cfg.robot.has_value(), "robot", "verify");
  require(cfg.true_params.has_value(), "true_params", "verify");
  require(cfg.verification.trajectory.has_value(), "verification.trajectory", "verify");
  if (!fs::exists(estimate)) throw IoError("estimate file not found: " + estimate.string());
  const auto j = read_json(estimate);
  if (!j.is_object() || !j.contains("params")) throw IoError(estimate.string() + ": no 'params' entry");
  const DynamicParams est = params_from_json(j["params"]);
  if (est.dof() != cfg.robot->dof())
    throw IoError(estimate.string() + ": parameters for " + std::to_string(est.dof()) + " links, robot has " +
                  std::to_string(cfg.robot->dof()));

  Verification v = verify(*cfg.robot, *cfg.true_params, est, *cfg.verification.trajectory, cfg.verification.count);
  write_verification_csv(out / files::kVerification, v);
  ordered_json summary;
  summary["rms_relative"] = ordered_json::array();
  for (Eigen::Index k = 0; k < v.rms_relative.size(); ++k) {
    const double r = v.rms_relative[k];
    summary["rms_relative"].push_back(std::isfinite(r) ? ordered_json(r) : ordered_json(nullptr));
  }
  write_json(out / files::kVerificationSummary, summary);
  log << "relative RMS torque error per joint:";
  for (Eigen::Index k = 0; k < v.rms_relative.size(); ++k) log << " " << format_number(v.rms_relative[k]);
  log << "\nwrote " << (out / files::kVerification).string() << "\n";
  return v;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parameter identification of serial robots with particle swarm optimization", "swarmid"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string samples_path, trajectory_path, estimate_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Master seed, overrides the config");
    sub->add_option("--out", out_dir, "Output directory, overrides the config");
  };
  auto* plan = app.add_subcommand("plan", "Plan an excitation trajectory");
  common(plan);
  auto* sample = app.add_subcommand("sample", "Simulate noisy samples along the trajectory");
  common(sample);
  sample->add_option("--trajectory", trajectory_path, "Trajectory file written by plan");
  auto* est = app.add_subcommand("estimate", "Single PSO estimation run");
  common(est);
  est->add_option("--samples", samples_path, "Sample CSV (default <out>/samples.csv)");
  auto* cls = app.add_subcommand("classify", "Repeated estimation and identifiability report");
  common(cls);
  cls->add_option("--samples", samples_path, "Sample CSV (default <out>/samples.csv)");
  auto* ver = app.add_subcommand("verify", "Compare true and estimated torques");
  common(ver);
  ver->add_option("--estimate", estimate_path, "estimate.json or report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  if (seed) cfg.seed = *seed;
  const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
  const fs::path samples = samples_path.empty() ? dir / files::kSamples : fs::path(samples_path);

  try {
    if (*plan) cmd_plan(cfg, dir, out);
    if (*sample)
      cmd_sample(cfg, dir, trajectory_path.empty() ? std::nullopt : std::optional<fs::path>(trajectory_path), out);
    if (*est) cmd_estimate(cfg, samples, dir, out);
    if (*cls) cmd_classify(cfg, samples, dir, out);
    if (*ver) cmd_verify(cfg, estimate_path, dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PlanningError& e) {
    err << "error: " << e.what() << "\n";
    for (const Violation& v : e.worst()) err << "  " << describe(v) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace swarmid
