#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmid/pso.hpp"

namespace swarmid {

struct SinusoidTerm {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
};

/// q(t) = offset + sum_k a_k sin(w_k t)
struct JointMotion {
  double offset = 0.0;
  std::array<SinusoidTerm, 3> terms{};
};

struct FourierTrajectory {
  std::vector<JointMotion> joints;
  double duration = 10.0;

  std::size_t dof() const { return joints.size(); }

  /// Flat (a_1, w_1, a_2, w_2, a_3, w_3) per joint; 6n values.
  std::vector<double> sinusoid_parameters() const;
  static FourierTrajectory from_parameters(std::span<const double> offsets,
                                           std::span<const double> sinusoids, double duration);

  void validate() const;
};

struct JointState {
  Eigen::VectorXd q, qd, qdd;
};

/// (T / count) * i, landing exactly on T for i == count.
inline double sample_time(double duration, std::size_t count, std::size_t i) {
  return i == count ? duration : duration / static_cast<double>(count) * static_cast<double>(i);
}

/// Analytic position, velocity and acceleration at time t in [0, duration].
JointState eval_trajectory(const FourierTrajectory& traj, double t);

/// N x 3n matrix; row i holds [q_1, qd_1, qdd_1, ..., q_n, qd_n, qdd_n] at
/// t = (T / N) * i for i = 1..N.
Eigen::MatrixXd build_qsam(const FourierTrajectory& traj, std::size_t samples);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct JointLimits {
  Interval q, qd, qdd;
};

struct JointConstraints {
  std::vector<JointLimits> joints;
  // Fraction by which every interval is shrunk toward its centre.
  double margin = 0.02;

  std::size_t dof() const { return joints.size(); }
  /// order: 0 position, 1 velocity, 2 acceleration.
  Interval effective(std::size_t joint, int order) const;
  void validate() const;
};

struct Violation {
  std::size_t joint = 0;
  int order = 0;
  double time = 0.0;
  double value = 0.0;
  Interval bound;
  // Distance outside the effective bound.
  double excess = 0.0;
};

struct ConstraintCheck {
  bool violated = false;  // the binary flag of the excitation objective
  // Worst violation per (joint, order), sorted by decreasing excess.
  std::vector<Violation> violations;
};

/// Checks every component at t = (T / grid) * i, i = 0..grid, against the
/// margin-shrunk bounds. grid must be at least the sample count used for Q.
ConstraintCheck check_constraints(const FourierTrajectory& traj, const JointConstraints& cons,
                                  std::size_t grid);

enum class ObjectiveMode {
  // log(1 + det(Q^T Q)) from singular values, penalty 1e6
  Stable,
  // |det(Q^T Q)| by LU, penalty 1e40
  Faithful,
};

inline constexpr double kStablePenalty = 1e6;
inline constexpr double kFaithfulPenalty = 1e40;

struct ExcitationSettings {
  std::size_t samples = 100;
  std::size_t grid = 1000;
  ObjectiveMode mode = ObjectiveMode::Stable;
};

/// |det(Q^T Q)| through an LU factorization; exactly 0 when N < 3n.
double gram_determinant(const Eigen::MatrixXd& qsam);
/// log(1 + det(Q^T Q)) evaluated from the singular values of Q.
double log1p_gram_determinant(const Eigen::MatrixXd& qsam);

/// Excitation quality H_Q. Non-negative for feasible trajectories and
/// strictly negative for infeasible ones in both modes.
double excitation_objective(const FourierTrajectory& traj, const JointConstraints& cons,
                            const ExcitationSettings& settings);

/// Sign-symmetric box over the 6n sinusoid parameters: amplitudes within half
/// of each joint's position range, frequencies within +-frequency_limit.
SearchBox default_planner_box(const JointConstraints& cons, double frequency_limit = 3.0);

struct PlanResult {
  FourierTrajectory trajectory;
  double objective = 0.0;
  PsoResult search;
};

class PlanningError : public std::runtime_error {
 public:
  PlanningError(const std::string& what, std::vector<Violation> worst)
      : std::runtime_error(what), worst_(std::move(worst)) {}
  const std::vector<Violation>& worst() const { return worst_; }

 private:
  std::vector<Violation> worst_;
};

/// Maximizes H_Q over the sinusoid parameters with offsets fixed to `start`.
/// Throws PlanningError when no feasible trajectory is found.
PlanResult plan_trajectory(const JointConstraints& cons, std::span<const double> start,
                           const SearchBox& box, const PsoConfig& pso,
                           const ExcitationSettings& settings, double duration = 10.0);

std::string describe(const Violation& v);

}  // namespace swarmid
