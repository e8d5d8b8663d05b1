#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmid/dynamics.hpp"
#include "swarmid/estimation.hpp"
#include "swarmid/pso.hpp"
#include "swarmid/trajectory.hpp"

namespace swarmid {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlannerSettings {
  std::vector<double> start;
  double frequency_limit = 3.0;
  double duration = 10.0;
  ExcitationSettings excitation;
  PsoConfig pso;
};

struct SamplingSettings {
  std::size_t count = 100;
  double duration = 10.0;
  double noise_level = 0.0;
};

struct EstimatorSettings {
  PsoConfig pso;
  ParameterRanges ranges;
  // Flat indices searched by the swarm; empty means all 12n.
  std::vector<std::size_t> free;
  // Values of the parameters left out of `free`; zeros when absent.
  std::optional<DynamicParams> fixed;
  CostNorm norm = CostNorm::Frobenius;

  EstimationOptions options(std::size_t dof) const;
  SearchBox box(std::size_t dof) const;
};

struct VerificationSettings {
  std::optional<FourierTrajectory> trajectory;
  std::size_t count = 1000;
};

/// Every section is optional at load time; commands check for the ones they
/// need. Cross-section consistency (joint counts, durations) is checked on
/// load.
struct ExperimentConfig {
  std::optional<RobotModel> robot;
  std::optional<DynamicParams> true_params;
  std::optional<JointConstraints> constraints;
  std::optional<FourierTrajectory> trajectory;
  std::optional<PlannerSettings> planner;
  std::optional<SamplingSettings> sampling;
  std::optional<EstimatorSettings> estimator;
  std::optional<ClassifySettings> classification;
  VerificationSettings verification;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Independent stream seeds for the planner, the sample noise and the
/// estimator, all derived from the master seed.
enum class SeedStream : std::uint64_t { Planner = 1, Sampling = 2, Estimator = 3 };
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream);

}  // namespace swarmid
