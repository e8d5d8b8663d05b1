#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmid/dynamics.hpp"
#include "swarmid/pso.hpp"
#include "swarmid/trajectory.hpp"

namespace swarmid {

struct Sample {
  double t = 0.0;
  Eigen::VectorXd q, qd, qdd, tau;
};

using SampleSet = std::vector<Sample>;

/// Samples at t = (T / N) * i, i = 1..N. Every stored scalar x (states and
/// torques) becomes x * (1 + u), u ~ U[-noise_level, noise_level], drawn in
/// sample order from a generator seeded with `seed`.
SampleSet generate_samples(const RobotModel& model, const DynamicParams& true_params,
                           const FourierTrajectory& traj, std::size_t count, double noise_level,
                           std::uint64_t seed);

/// n x N matrix whose column i is tau_(i) - tau_hat_(i) under `candidate`.
Eigen::MatrixXd prediction_error(const RobotModel& model, const DynamicParams& candidate,
                                 const SampleSet& samples);

enum class CostNorm { Frobenius, Spectral };

double cost(const Eigen::MatrixXd& error, CostNorm norm = CostNorm::Frobenius);

/// Which flat parameters the swarm searches over. Parameters not listed stay
/// at their value in `base`.
struct ParameterSubset {
  std::vector<std::size_t> free;
  DynamicParams base;

  static ParameterSubset all(std::size_t dof);
  DynamicParams expand(std::span<const double> reduced) const;
  std::vector<double> reduce(const DynamicParams& full) const;
};

struct EstimationOptions {
  std::optional<ParameterSubset> subset;
  CostNorm norm = CostNorm::Frobenius;
};

struct EstimationRun {
  DynamicParams best_params;
  double best_cost = 0.0;
  std::vector<double> history;
  std::uint64_t seed = 0;
};

/// Default box over the 12 fields of every link: mass [0, 10], centre of mass
/// [-2, 2], inertia [-6, 6], friction [0, 3].
struct ParameterRanges {
  Interval mass{0.0, 10.0};
  Interval com{-2.0, 2.0};
  Interval inertia{-6.0, 6.0};
  Interval friction{0.0, 3.0};

  SearchBox box(std::size_t dof) const;
};

/// Box restricted to the free parameters of a subset.
SearchBox restrict_box(const SearchBox& full, const ParameterSubset& subset);

EstimationRun estimate(const RobotModel& model, const SampleSet& samples, const SearchBox& box,
                       const PsoConfig& pso, const EstimationOptions& options = {});

enum class Identifiability { Identifiable, SemiOrNearlyUnidentifiable, Unidentifiable };

std::string to_string(Identifiability status);

struct ClassifySettings {
  std::size_t runs = 10;
  double cv_threshold = 0.15;
  double sens_threshold = 0.01;
  double probe_delta = 0.2;
  double probe_floor = 0.1;

  void validate() const;
};

struct ParameterStats {
  std::size_t index = 0;  // flat parameter index
  std::string name;
  std::optional<double> true_value;
  double mean = 0.0;
  double cv = 0.0;      // sample std / |mean|
  double spread = 0.0;  // max - min
  std::optional<double> sensitivity;  // only probed when the CV gate fails
  Identifiability status = Identifiability::Identifiable;
};

struct EstimationReport {
  std::vector<ParameterStats> rows;
  std::vector<EstimationRun> runs;
  std::size_t best_run = 0;
  // Mean over runs of every parameter, fixed ones included.
  DynamicParams mean_params;
};

class ClassificationError : public std::runtime_error {
 public:
  ClassificationError(const std::string& what, std::vector<EstimationRun> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<EstimationRun>& partial() const { return partial_; }

 private:
  std::vector<EstimationRun> partial_;
};

/// Relative cost change when one parameter of `base` is moved by
/// +-delta * max(|value|, floor); the larger of the two probes.
double sensitivity_probe(const RobotModel& model, const SampleSet& samples,
                         const DynamicParams& base, std::size_t param_index, double delta,
                         double floor = 0.1, CostNorm norm = CostNorm::Frobenius);

/// Runs `estimate` R times with seeds pso.seed + 1 .. pso.seed + R and labels
/// every searched parameter I, SI/NUI or UI.
EstimationReport classify(const RobotModel& model, const SampleSet& samples, const SearchBox& box,
                          const PsoConfig& pso, const ClassifySettings& settings,
                          const EstimationOptions& options = {},
                          const std::optional<DynamicParams>& truth = std::nullopt);

struct Verification {
  std::vector<double> t;
  Eigen::MatrixXd tau_true;  // (N + 1) x n
  Eigen::MatrixXd tau_est;
  Eigen::VectorXd rms_relative;  // RMS(est - true) / RMS(true) per joint
};

/// Drives both parameter sets along the noise-free trajectory at
/// t = (T / N) * i, i = 0..N.
Verification verify(const RobotModel& model, const DynamicParams& true_params,
                    const DynamicParams& est_params, const FourierTrajectory& traj,
                    std::size_t count);

}  // namespace swarmid
