#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swarmid {

enum class JointKind { Revolute, Prismatic };

/// One row of a standard (distal) Denavit-Hartenberg table.
///
/// For a revolute joint the joint variable is added to `theta_offset` and `d`
/// is fixed; for a prismatic joint it is added to `d` and `theta_offset` is
/// fixed.
struct DHLink {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  JointKind joint_kind = JointKind::Revolute;
};

struct RobotModel {
  std::vector<DHLink> links;
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};

  std::size_t dof() const { return links.size(); }

  /// Throws std::invalid_argument if the model has no links or a non-finite
  /// gravity vector.
  void validate() const;
};

/// Mass, first-moment location, inertia about the centre of mass (link frame)
/// and joint friction of one link. No physical validity is implied: the
/// estimator may evaluate negative masses or indefinite tensors.
struct LinkDynamicParams {
  static constexpr std::size_t kCount = 12;

  double m = 0.0;
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  // I_xx, I_yy, I_zz, I_xy, I_yz, I_xz
  std::array<double, 6> inertia{};
  double f_c = 0.0;
  double f_v = 0.0;

  Eigen::Matrix3d inertia_matrix() const;
};

/// Canonical per-link field names, in flattening order.
inline constexpr std::array<const char*, LinkDynamicParams::kCount> kLinkParamNames = {
    "m", "s_x", "s_y", "s_z", "I_xx", "I_yy", "I_zz", "I_xy", "I_yz", "I_xz", "f_c", "f_v"};

enum LinkParamIndex : std::size_t {
  kMass = 0, kSx, kSy, kSz, kIxx, kIyy, kIzz, kIxy, kIyz, kIxz, kFc, kFv
};

struct DynamicParams {
  std::vector<LinkDynamicParams> per_link;

  std::size_t dof() const { return per_link.size(); }

  /// [m, s_x, s_y, s_z, I_xx, I_yy, I_zz, I_xy, I_yz, I_xz, f_c, f_v] per link.
  std::vector<double> flatten() const;
  static DynamicParams unflatten(std::span<const double> values);

  static DynamicParams zeros(std::size_t dof);
};

/// Flat index of field `field` on link `link` (both zero-based).
constexpr std::size_t param_index(std::size_t link, std::size_t field) {
  return link * LinkDynamicParams::kCount + field;
}

/// Human-readable name of a flat parameter index, e.g. "link3.s_z".
std::string param_name(std::size_t flat_index);

/// Inverse of param_name. Throws std::invalid_argument on unknown names.
std::size_t parse_param_name(const std::string& name, std::size_t dof);

/// Homogeneous transform Rot_z(theta) * Trans_z(d) * Trans_x(a) * Rot_x(alpha).
Eigen::Matrix4d link_transform(const DHLink& link, double joint_value);

/// f_c * sign(qd) + f_v * qd with sign(0) = 0.
double friction_torque(const LinkDynamicParams& link_params, double qd);

/// Joint forces/torques from recursive Newton-Euler plus joint friction.
///
/// Link frames follow the distal DH convention: frame i sits at the end of
/// link i and joint i moves along/about z_{i-1}. Gravity enters as a base
/// acceleration of -gravity. Throws std::invalid_argument on size mismatch.
Eigen::VectorXd inverse_dynamics(const RobotModel& model, const DynamicParams& params,
                                 const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& qdd);

}  // namespace swarmid
