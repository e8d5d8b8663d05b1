#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "swarmid/config.hpp"
#include "swarmid/estimation.hpp"
#include "swarmid/trajectory.hpp"

namespace swarmid {

/// Output file names, relative to the output directory.
namespace files {
inline constexpr const char* kTrajectory = "trajectory.json";
inline constexpr const char* kTrajectorySeries = "trajectory.csv";
inline constexpr const char* kPlanHistory = "plan_history.csv";
inline constexpr const char* kSamples = "samples.csv";
inline constexpr const char* kEstimate = "estimate.json";
inline constexpr const char* kHistory = "history.csv";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kVerification = "verification.csv";
inline constexpr const char* kVerificationSummary = "verification.json";
}  // namespace files

/// Plans an excitation trajectory and writes it with its objective value,
/// a time series for plotting and the search history. Throws PlanningError
/// when no feasible trajectory is found.
PlanResult cmd_plan(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Trajectory used for sampling: a trajectory file if given, else the
/// explicit config trajectory, else a fresh plan.
FourierTrajectory sampling_trajectory(const ExperimentConfig& cfg,
                                      const std::optional<std::filesystem::path>& trajectory_file,
                                      std::ostream& log);

SampleSet cmd_sample(const ExperimentConfig& cfg, const std::filesystem::path& out,
                     const std::optional<std::filesystem::path>& trajectory_file, std::ostream& log);

EstimationRun cmd_estimate(const ExperimentConfig& cfg, const std::filesystem::path& samples,
                           const std::filesystem::path& out, std::ostream& log);

EstimationReport cmd_classify(const ExperimentConfig& cfg, const std::filesystem::path& samples,
                              const std::filesystem::path& out, std::ostream& log);

/// `estimate` may be an estimate result or a classification report; the
/// report's mean parameters are used.
Verification cmd_verify(const ExperimentConfig& cfg, const std::filesystem::path& estimate,
                        const std::filesystem::path& out, std::ostream& log);

/// Whole command line: parses arguments, loads the config, dispatches.
/// Returns 0 on success, 1 on a failed run, 2 on bad usage or config.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swarmid
