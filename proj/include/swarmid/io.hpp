#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmid/dynamics.hpp"
#include "swarmid/estimation.hpp"
#include "swarmid/trajectory.hpp"

namespace swarmid {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Header `t,q1..qn,qd1..qdn,qdd1..qddn,tau1..taun`, one row per sample.
void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples);

/// Reads a sample CSV for an n-joint robot. Errors name the offending line.
SampleSet read_samples_csv(const std::filesystem::path& path, std::size_t dof);

/// `iteration,best_value`, iterations counted from 1.
void write_history_csv(const std::filesystem::path& path, const std::vector<double>& history);

/// `t,tau_true_1..n,tau_est_1..n`.
void write_verification_csv(const std::filesystem::path& path, const Verification& v);

/// `t,q1,qd1,qdd1,...` on the grid t = (T / N) * i, i = 0..N.
void write_trajectory_csv(const std::filesystem::path& path, const FourierTrajectory& traj,
                          std::size_t count);

/// `name,link,true_value,mean,cv,spread,sensitivity,status`.
void write_report_csv(const std::filesystem::path& path, const EstimationReport& report);

nlohmann::ordered_json trajectory_to_json(const FourierTrajectory& traj);
FourierTrajectory trajectory_from_json(const nlohmann::json& j);

/// One object per link with fields m, s, inertia, f_c, f_v.
nlohmann::ordered_json params_to_json(const DynamicParams& params);
DynamicParams params_from_json(const nlohmann::json& j);

nlohmann::ordered_json run_to_json(const EstimationRun& run);
nlohmann::ordered_json report_to_json(const EstimationReport& report);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace swarmid
