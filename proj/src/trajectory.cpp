#include "swarmid/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace swarmid {

std::vector<double> FourierTrajectory::sinusoid_parameters() const {
  std::vector<double> out;
  out.reserve(6 * joints.size());
  for (const auto& j : joints)
    for (const auto& term : j.terms) {
      out.push_back(term.amplitude);
      out.push_back(term.frequency);
    }
  return out;
}

FourierTrajectory FourierTrajectory::from_parameters(std::span<const double> offsets,
                                                     std::span<const double> sinusoids,
                                                     double duration) {
  if (sinusoids.size() != 6 * offsets.size())
    throw std::invalid_argument("trajectory: expected 6 sinusoid parameters per joint");
  FourierTrajectory traj;
  traj.duration = duration;
  traj.joints.resize(offsets.size());
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    traj.joints[j].offset = offsets[j];
    for (std::size_t k = 0; k < 3; ++k)
      traj.joints[j].terms[k] = {sinusoids[6 * j + 2 * k], sinusoids[6 * j + 2 * k + 1]};
  }
  return traj;
}

void FourierTrajectory::validate() const {
  if (joints.empty()) throw std::invalid_argument("trajectory: no joints");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("trajectory: duration must be positive and finite");
  for (const auto& j : joints) {
    bool finite = std::isfinite(j.offset);
    for (const auto& t : j.terms) finite = finite && std::isfinite(t.amplitude) && std::isfinite(t.frequency);
    if (!finite) throw std::invalid_argument("trajectory: non-finite coefficient");
  }
}

JointState eval_trajectory(const FourierTrajectory& traj, double t) {
  if (!(t >= 0.0 && t <= traj.duration))
    throw std::out_of_range("trajectory: time " + std::to_string(t) + " outside [0, " +
                            std::to_string(traj.duration) + "]");
  const auto n = static_cast<Eigen::Index>(traj.dof());
  JointState s{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const JointMotion& m = traj.joints[j];
    double q = m.offset, qd = 0.0, qdd = 0.0;
    for (const auto& term : m.terms) {
      const double wt = term.frequency * t;
      const double sn = std::sin(wt), cs = std::cos(wt);
      q += term.amplitude * sn;
      qd += term.amplitude * term.frequency * cs;
      qdd -= term.amplitude * term.frequency * term.frequency * sn;
    }
    s.q[j] = q;
    s.qd[j] = qd;
    s.qdd[j] = qdd;
  }
  return s;
}

Eigen::MatrixXd build_qsam(const FourierTrajectory& traj, std::size_t samples) {
  if (samples < 1) throw std::invalid_argument("build_qsam: need at least one sample");
  const std::size_t n = traj.dof();
  Eigen::MatrixXd Q(samples, 3 * n);
  for (std::size_t i = 1; i <= samples; ++i) {
    const double t = sample_time(traj.duration, samples, i);
    const JointState s = eval_trajectory(traj, t);
    for (std::size_t j = 0; j < n; ++j) {
      Q(i - 1, 3 * j) = s.q[j];
      Q(i - 1, 3 * j + 1) = s.qd[j];
      Q(i - 1, 3 * j + 2) = s.qdd[j];
    }
  }
  return Q;
}

Interval JointConstraints::effective(std::size_t joint, int order) const {
  const JointLimits& l = joints.at(joint);
  const Interval& raw = order == 0 ? l.q : order == 1 ? l.qd : l.qdd;
  const double centre = 0.5 * (raw.lower + raw.upper);
  const double half = 0.5 * (raw.upper - raw.lower) * (1.0 - margin);
  return {centre - half, centre + half};
}

void JointConstraints::validate() const {
  if (joints.empty()) throw std::invalid_argument("constraints: no joints");
  if (!(margin >= 0.0 && margin < 1.0))
    throw std::invalid_argument("constraints: margin must lie in [0, 1)");
  for (std::size_t j = 0; j < joints.size(); ++j)
    for (const Interval* iv : {&joints[j].q, &joints[j].qd, &joints[j].qdd})
      if (!(iv->lower < iv->upper) || !std::isfinite(iv->lower) || !std::isfinite(iv->upper))
        throw std::invalid_argument("constraints: joint " + std::to_string(j + 1) +
                                    " has an empty or non-finite interval (min must be < max)");
}

ConstraintCheck check_constraints(const FourierTrajectory& traj, const JointConstraints& cons,
                                  std::size_t grid) {
  if (cons.dof() != traj.dof())
    throw std::invalid_argument("check_constraints: constraint and trajectory dof differ");
  if (grid < 1) throw std::invalid_argument("check_constraints: grid must be >= 1");
  const std::size_t n = traj.dof();

  std::vector<Interval> bounds(3 * n);
  for (std::size_t j = 0; j < n; ++j)
    for (int o = 0; o < 3; ++o) bounds[3 * j + o] = cons.effective(j, o);

  std::vector<Violation> worst(3 * n);
  std::vector<bool> hit(3 * n, false);
  for (std::size_t i = 0; i <= grid; ++i) {
    const double t = sample_time(traj.duration, grid, i);
    const JointState s = eval_trajectory(traj, t);
    for (std::size_t j = 0; j < n; ++j) {
      const double vals[3] = {s.q[j], s.qd[j], s.qdd[j]};
      for (int o = 0; o < 3; ++o) {
        const Interval& b = bounds[3 * j + o];
        const double excess = std::max(b.lower - vals[o], vals[o] - b.upper);
        if (excess > 0.0 && (!hit[3 * j + o] || excess > worst[3 * j + o].excess)) {
          hit[3 * j + o] = true;
          worst[3 * j + o] = Violation{j, o, t, vals[o], b, excess};
        }
      }
    }
  }

  ConstraintCheck out;
  for (std::size_t k = 0; k < worst.size(); ++k)
    if (hit[k]) out.violations.push_back(worst[k]);
  std::stable_sort(out.violations.begin(), out.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.excess > b.excess; });
  out.violated = !out.violations.empty();
  return out;
}

double gram_determinant(const Eigen::MatrixXd& qsam) {
  if (qsam.rows() < qsam.cols()) return 0.0;
  const Eigen::MatrixXd G = qsam.transpose() * qsam;
  return std::abs(G.partialPivLu().determinant());
}

double log1p_gram_determinant(const Eigen::MatrixXd& qsam) {
  if (qsam.rows() < qsam.cols()) return 0.0;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(qsam).singularValues();
  if (sv.size() == 0 || sv.minCoeff() <= 0.0) return 0.0;
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) logdet += 2.0 * std::log(sv[i]);
  // log(1 + e^L) without overflow
  return logdet > 40.0 ? logdet + std::log1p(std::exp(-logdet)) : std::log1p(std::exp(logdet));
}

double excitation_objective(const FourierTrajectory& traj, const JointConstraints& cons,
                            const ExcitationSettings& settings) {
  if (settings.grid < settings.samples)
    throw std::invalid_argument("excitation_objective: check grid must be at least the sample count");
  const bool infeasible = check_constraints(traj, cons, settings.grid).violated;
  const Eigen::MatrixXd Q = build_qsam(traj, settings.samples);
  if (settings.mode == ObjectiveMode::Faithful) {
    // det - 1e40 already rounds to -1e40 for any realistic det; pinning it
    // keeps infeasible scores negative when det itself is astronomically large.
    return infeasible ? -kFaithfulPenalty : gram_determinant(Q);
  }
  return log1p_gram_determinant(Q) - (infeasible ? kStablePenalty : 0.0);
}

SearchBox default_planner_box(const JointConstraints& cons, double frequency_limit) {
  SearchBox box;
  for (const auto& j : cons.joints) {
    const double amp = 0.5 * (j.q.upper - j.q.lower);
    for (int k = 0; k < 3; ++k) {
      box.lower.push_back(-amp);
      box.upper.push_back(amp);
      box.lower.push_back(-frequency_limit);
      box.upper.push_back(frequency_limit);
    }
  }
  return box;
}

PlanResult plan_trajectory(const JointConstraints& cons, std::span<const double> start,
                           const SearchBox& box, const PsoConfig& pso,
                           const ExcitationSettings& settings, double duration) {
  cons.validate();
  box.validate();
  const std::size_t n = cons.dof();
  if (start.size() != n) throw std::invalid_argument("plan_trajectory: start has wrong length");
  if (box.dim() != 6 * n) throw std::invalid_argument("plan_trajectory: box must cover 6n parameters");
  for (std::size_t j = 0; j < n; ++j)
    if (!(start[j] >= cons.joints[j].q.lower && start[j] <= cons.joints[j].q.upper))
      throw std::invalid_argument("plan_trajectory: start of joint " + std::to_string(j + 1) +
                                  " is outside its position bounds");

  const std::vector<double> offsets(start.begin(), start.end());
  Objective objective{6 * n, [&](std::span<const double> x) {
                        const auto traj = FourierTrajectory::from_parameters(offsets, x, duration);
                        return -excitation_objective(traj, cons, settings);
                      }};

  // One particle starts on the constant trajectory (zero amplitudes) so the
  // swarm holds a feasible point from the outset whenever one exists.
  std::vector<double> resting(6 * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t a = 6 * j + 2 * k;
      resting[a] = std::clamp(0.0, box.lower[a], box.upper[a]);
      resting[a + 1] = box.lower[a + 1] + (box.upper[a + 1] - box.lower[a + 1]) * (k + 1) / 4.0;
    }
  PsoOptions options;
  options.initial_positions.push_back(resting);

  PlanResult result;
  result.search = minimize(objective, box, pso, options);
  result.trajectory = FourierTrajectory::from_parameters(offsets, result.search.best_position, duration);
  result.objective = -result.search.best_value;

  const ConstraintCheck check = check_constraints(result.trajectory, cons, settings.grid);
  if (check.violated) {
    std::ostringstream msg;
    msg << "planning failed: no feasible trajectory found in " << pso.iterations << " iterations";
    throw PlanningError(msg.str(), check.violations);
  }
  return result;
}

std::string describe(const Violation& v) {
  static const char* kOrder[] = {"position", "velocity", "acceleration"};
  std::ostringstream os;
  os << "joint " << v.joint + 1 << " " << kOrder[v.order] << " = " << v.value << " at t = " << v.time
     << " outside [" << v.bound.lower << ", " << v.bound.upper << "]";
  return os.str();
}

}  // namespace swarmid
