#pragma once

// Bundled three-joint cylindrical robot (revolute base, vertical and radial
// prismatic joints) together with the reference parameter sets, trajectories
// and joint bounds used by the experiments and tests.

#include <numbers>

#include "swarmid/dynamics.hpp"
#include "swarmid/estimation.hpp"
#include "swarmid/trajectory.hpp"

namespace swarmid::cylindrical {

inline RobotModel robot() {
  RobotModel m;
  m.links = {
      DHLink{0.0, 0.0, 0.0, 0.0, JointKind::Revolute},
      DHLink{0.0, -std::numbers::pi / 2.0, 0.0, 0.0, JointKind::Prismatic},
      DHLink{0.0, 0.0, 0.0, 0.0, JointKind::Prismatic},
  };
  return m;
}

namespace detail {
inline LinkDynamicParams link(double m, Eigen::Vector3d s, std::array<double, 6> inertia, double fc,
                              double fv) {
  LinkDynamicParams l;
  l.m = m;
  l.s = s;
  l.inertia = inertia;
  l.f_c = fc;
  l.f_v = fv;
  return l;
}
}  // namespace detail

/// Full 36-parameter truth. Centre-of-mass components are stored directly;
/// reference listings of this robot give their negatives.
inline DynamicParams true_params() {
  DynamicParams p;
  p.per_link = {
      detail::link(2.0, {-0.5, -0.5, -1.0}, {4.0, 1.0, 4.0, 1.0, 1.0, 1.0}, 1.0, 1.0),
      detail::link(5.0, {-0.5, -0.5, -0.5}, {3.0, 1.0, 3.0, 1.0, 1.0, 1.0}, 1.0, 1.0),
      detail::link(3.0, {-0.5, -0.5, -0.5}, {2.0, 2.0, 2.0, 0.5, 0.5, 0.5}, 1.0, 1.0),
  };
  return p;
}

/// Simplified robot: links are one-dimensional (centre of mass on the joint
/// axis, a single inertia component about the base axis), no friction. Only
/// m2, m3, s3z and I1zz + I2yy + I3yy = 3 influence the torques.
inline DynamicParams simplified_params() {
  DynamicParams p;
  p.per_link = {
      detail::link(2.0, {0.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0, 0.0, 0.0}, 0.0, 0.0),
      detail::link(5.0, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0, 0.0, 0.0}, 0.0, 0.0),
      detail::link(3.0, {0.0, 0.0, -0.5}, {0.0, 1.0, 0.0, 0.0, 0.0, 0.0}, 0.0, 0.0),
  };
  return p;
}

/// Searched parameters of the simplified robot: m2, m3, s3z and I1zz (the
/// other two inertia terms of the sum stay at their base values).
inline ParameterSubset simplified_subset() {
  ParameterSubset s;
  s.free = {param_index(1, kMass), param_index(2, kMass), param_index(2, kSz), param_index(0, kIzz)};
  s.base = simplified_params();
  return s;
}

inline double inertia_sum(const DynamicParams& p) {
  return p.per_link[0].inertia[2] + p.per_link[1].inertia[1] + p.per_link[2].inertia[1];
}

inline JointConstraints unit_constraints() {
  JointConstraints c;
  c.joints.assign(3, JointLimits{{0.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
  return c;
}

inline JointConstraints experiment_constraints() {
  const double pi = std::numbers::pi;
  JointConstraints c;
  c.joints = {
      JointLimits{{-pi, pi}, {-4.0, 4.0}, {-3.0, 3.0}},
      JointLimits{{0.0, 1.0}, {-2.0, 2.0}, {-2.0, 2.0}},
      JointLimits{{0.0, 1.0}, {-1.5, 1.5}, {-1.0, 1.0}},
  };
  return c;
}

namespace detail {
inline FourierTrajectory fourier(std::array<double, 3> offsets,
                                 std::array<std::array<double, 6>, 3> terms) {
  FourierTrajectory t;
  t.duration = 10.0;
  t.joints.resize(3);
  for (int j = 0; j < 3; ++j) {
    t.joints[j].offset = offsets[j];
    for (int k = 0; k < 3; ++k) t.joints[j].terms[k] = {terms[j][2 * k], terms[j][2 * k + 1]};
  }
  return t;
}
}  // namespace detail

/// Reference sampling trajectory of the full experiment.
inline FourierTrajectory sampling_trajectory() {
  return detail::fourier({-2.63, 0.11, -0.08}, {{
                                                   {0.97, 1.15, 0.83, 1.1, 1.94, 0.42},
                                                   {0.96, 0.57, 0.35, 2.05, -1.1, 0.12},
                                                   {-2.3, 0.07, 0.32, 1.5, 1.42, 0.38},
                                               }});
}

/// Verification trajectory driven through both the true and estimated robot.
inline FourierTrajectory verification_trajectory() {
  return detail::fourier({-2.7, -0.06, 0.16}, {{
                                                  {1.97, 0.5, 0.44, 2.2, 0.35, 0.9},
                                                  {0.6, 1.7, -0.3, 1.45, 0.86, 0.7},
                                                  {0.4, 0.3, 0.4, 1.3, 0.13, 1.2},
                                              }});
}

/// Reference planned and random trajectories for the unit-bounds problem,
/// offsets at the start configuration (0.5, 0.5, 0.5).
inline FourierTrajectory reference_planned_trajectory() {
  return detail::fourier({0.5, 0.5, 0.5}, {{
                                              {0.0184, 0.0113, 0.2105, 2.2918, 0.3841, 0.5601},
                                              {0.0308, 0.0624, -0.2101, -0.0124, 0.5056, 1.3691},
                                              {0.3410, 1.8234, -0.1658, -0.3325, 0.2849, -0.8144},
                                          }});
}

inline FourierTrajectory random_trajectory_1() {
  return detail::fourier({0.5, 0.5, 0.5}, {{
                                              {0.0494, 0.1000, 0.0085, 0.0688, 0.0486, 0.0332},
                                              {-0.0076, 0.0771, 0.0546, 0.0709, 0.0614, -0.1922},
                                              {0.0590, 0.0486, 0.0082, 0.0563, 0.0553, 0.0309},
                                          }});
}

inline FourierTrajectory random_trajectory_2() {
  return detail::fourier({0.5, 0.5, 0.5}, {{
                                              {0.0061, 0.0869, 0.0440, -0.7861, 0.0973, -0.0211},
                                              {0.1192, 0.1507, 0.1028, 0.0928, -0.1604, 0.0903},
                                              {0.1019, 0.1026, 0.0765, 0.0726, 0.0726, 0.0349},
                                          }});
}

}  // namespace swarmid::cylindrical
