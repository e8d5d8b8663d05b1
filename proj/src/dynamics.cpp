#include "swarmid/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmid {

namespace {

// Twist angles such as -pi/2 should give exact zeros in the rotation block so
// that parameters with no influence contribute exactly nothing to the torques.
double snap(double x) { return std::abs(x) < 1e-15 ? 0.0 : x; }

struct LinkFrame {
  Eigen::Matrix3d R;      // rotation of frame i relative to frame i-1
  Eigen::Vector3d pstar;  // origin of frame i from frame i-1, in frame i
};

LinkFrame link_frame(const DHLink& link, double joint_value) {
  double theta = link.theta_offset;
  double d = link.d;
  if (link.joint_kind == JointKind::Revolute)
    theta += joint_value;
  else
    d += joint_value;

  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = snap(std::cos(link.alpha)), sa = snap(std::sin(link.alpha));

  LinkFrame f;
  f.R << ct, -st * ca, st * sa,
         st, ct * ca, -ct * sa,
         0.0, sa, ca;
  f.pstar = Eigen::Vector3d(link.a, d * sa, d * ca);
  return f;
}

}  // namespace

void RobotModel::validate() const {
  if (links.empty()) throw std::invalid_argument("robot model needs at least one link");
  if (!gravity.allFinite()) throw std::invalid_argument("gravity vector must be finite");
}

Eigen::Matrix3d LinkDynamicParams::inertia_matrix() const {
  const auto& I = inertia;
  Eigen::Matrix3d M;
  M << I[0], I[3], I[5],
       I[3], I[1], I[4],
       I[5], I[4], I[2];
  return M;
}

std::vector<double> DynamicParams::flatten() const {
  std::vector<double> out;
  out.reserve(per_link.size() * LinkDynamicParams::kCount);
  for (const auto& l : per_link) {
    out.push_back(l.m);
    out.push_back(l.s.x());
    out.push_back(l.s.y());
    out.push_back(l.s.z());
    out.insert(out.end(), l.inertia.begin(), l.inertia.end());
    out.push_back(l.f_c);
    out.push_back(l.f_v);
  }
  return out;
}

DynamicParams DynamicParams::unflatten(std::span<const double> values) {
  if (values.size() % LinkDynamicParams::kCount != 0 || values.empty())
    throw std::invalid_argument("parameter vector length must be a positive multiple of 12");
  DynamicParams p;
  const std::size_t n = values.size() / LinkDynamicParams::kCount;
  p.per_link.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* v = values.data() + i * LinkDynamicParams::kCount;
    auto& l = p.per_link[i];
    l.m = v[kMass];
    l.s = Eigen::Vector3d(v[kSx], v[kSy], v[kSz]);
    for (std::size_t k = 0; k < 6; ++k) l.inertia[k] = v[kIxx + k];
    l.f_c = v[kFc];
    l.f_v = v[kFv];
  }
  return p;
}

DynamicParams DynamicParams::zeros(std::size_t dof) {
  DynamicParams p;
  p.per_link.resize(dof);
  return p;
}

std::string param_name(std::size_t flat_index) {
  const std::size_t link = flat_index / LinkDynamicParams::kCount;
  const std::size_t field = flat_index % LinkDynamicParams::kCount;
  return "link" + std::to_string(link + 1) + "." + kLinkParamNames[field];
}

std::size_t parse_param_name(const std::string& name, std::size_t dof) {
  for (std::size_t i = 0; i < dof * LinkDynamicParams::kCount; ++i)
    if (param_name(i) == name) return i;
  throw std::invalid_argument("unknown parameter name '" + name + "'");
}

Eigen::Matrix4d link_transform(const DHLink& link, double joint_value) {
  const LinkFrame f = link_frame(link, joint_value);
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T.topLeftCorner<3, 3>() = f.R;
  const double theta =
      link.theta_offset + (link.joint_kind == JointKind::Revolute ? joint_value : 0.0);
  const double d = link.d + (link.joint_kind == JointKind::Prismatic ? joint_value : 0.0);
  T.topRightCorner<3, 1>() = Eigen::Vector3d(link.a * std::cos(theta), link.a * std::sin(theta), d);
  return T;
}

double friction_torque(const LinkDynamicParams& link_params, double qd) {
  const double sign = (qd > 0.0) - (qd < 0.0);
  return link_params.f_c * sign + link_params.f_v * qd;
}

Eigen::VectorXd inverse_dynamics(const RobotModel& model, const DynamicParams& params,
                                 const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& qdd) {
  const std::size_t n = model.dof();
  if (params.dof() != n || static_cast<std::size_t>(q.size()) != n ||
      static_cast<std::size_t>(qd.size()) != n || static_cast<std::size_t>(qdd.size()) != n)
    throw std::invalid_argument("inverse_dynamics: dimension mismatch with robot model");

  const Eigen::Vector3d z0 = Eigen::Vector3d::UnitZ();

  std::vector<LinkFrame> frames(n);
  std::vector<Eigen::Vector3d> w(n), wd(n), vd(n);

  // outward pass: link velocities and accelerations in their own frames
  Eigen::Vector3d w_prev = Eigen::Vector3d::Zero();
  Eigen::Vector3d wd_prev = Eigen::Vector3d::Zero();
  Eigen::Vector3d vd_prev = -model.gravity;
  for (std::size_t i = 0; i < n; ++i) {
    frames[i] = link_frame(model.links[i], q[i]);
    const Eigen::Matrix3d Rt = frames[i].R.transpose();
    const Eigen::Vector3d& p = frames[i].pstar;
    if (model.links[i].joint_kind == JointKind::Revolute) {
      w[i] = Rt * (w_prev + z0 * qd[i]);
      wd[i] = Rt * (wd_prev + z0 * qdd[i] + w_prev.cross(z0 * qd[i]));
      vd[i] = wd[i].cross(p) + w[i].cross(w[i].cross(p)) + Rt * vd_prev;
    } else {
      w[i] = Rt * w_prev;
      wd[i] = Rt * wd_prev;
      vd[i] = Rt * (z0 * qdd[i] + vd_prev) + wd[i].cross(p) +
              2.0 * w[i].cross(Rt * z0 * qd[i]) + w[i].cross(w[i].cross(p));
    }
    w_prev = w[i];
    wd_prev = wd[i];
    vd_prev = vd[i];
  }

  // inward pass: force and moment exerted on link i by link i-1, frame i
  Eigen::VectorXd tau(n);
  Eigen::Vector3d f = Eigen::Vector3d::Zero();
  Eigen::Vector3d nm = Eigen::Vector3d::Zero();
  for (std::size_t k = n; k-- > 0;) {
    const LinkDynamicParams& lp = params.per_link[k];
    const Eigen::Vector3d& r = lp.s;
    const Eigen::Matrix3d I = lp.inertia_matrix();
    const Eigen::Vector3d& p = frames[k].pstar;

    const Eigen::Vector3d vc = wd[k].cross(r) + w[k].cross(w[k].cross(r)) + vd[k];
    const Eigen::Vector3d F = lp.m * vc;
    const Eigen::Vector3d N = I * wd[k] + w[k].cross(I * w[k]);

    const Eigen::Matrix3d R_next =
        (k + 1 < n) ? frames[k + 1].R : Eigen::Matrix3d::Identity().eval();
    const Eigen::Vector3d f_next = R_next * f;
    nm = R_next * nm + p.cross(f_next) + (p + r).cross(F) + N;
    f = f_next + F;

    // joint axis z_{k-1} expressed in frame k
    const Eigen::Vector3d axis = frames[k].R.transpose() * z0;
    const double generalized =
        model.links[k].joint_kind == JointKind::Revolute ? nm.dot(axis) : f.dot(axis);
    tau[k] = generalized + friction_torque(lp, qd[k]);
  }
  return tau;
}

}  // namespace swarmid
