#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cylindrical_oracle.hpp"
#include "swarmid/cylindrical.hpp"
#include "swarmid/dynamics.hpp"

using namespace swarmid;

namespace {

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
};

DynamicParams random_params(Rng& r, std::size_t n, bool friction = true) {
  DynamicParams p = DynamicParams::zeros(n);
  for (auto& l : p.per_link) {
    l.m = r(0.5, 5.0);
    l.s = Eigen::Vector3d(r(-0.5, 0.5), r(-0.5, 0.5), r(-0.5, 0.5));
    // diagonal dominant so the tensor is physical
    l.inertia = {r(1.0, 2.0), r(1.0, 2.0), r(1.0, 2.0), r(-0.2, 0.2), r(-0.2, 0.2), r(-0.2, 0.2)};
    if (friction) {
      l.f_c = r(0.0, 2.0);
      l.f_v = r(0.0, 2.0);
    }
  }
  return p;
}

// A three-joint arm exercising every DH field and both joint kinds.
RobotModel mixed_robot() {
  RobotModel m;
  m.links = {
      DHLink{0.3, std::numbers::pi / 2, 0.4, 0.1, JointKind::Revolute},
      DHLink{0.5, -0.3, 0.1, 0.2, JointKind::Prismatic},
      DHLink{0.2, 0.7, -0.2, 0.0, JointKind::Revolute},
  };
  m.gravity = Eigen::Vector3d(0.3, -0.2, -9.81);
  return m;
}

// Forward kinematics of every link frame in the base frame.
std::vector<Eigen::Matrix4d> frames(const RobotModel& m, const Eigen::VectorXd& q) {
  std::vector<Eigen::Matrix4d> out;
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  for (std::size_t i = 0; i < m.dof(); ++i) {
    T = T * link_transform(m.links[i], q[static_cast<Eigen::Index>(i)]);
    out.push_back(T);
  }
  return out;
}

// Kinetic energy from central differences of the forward kinematics; shares
// nothing with the Newton-Euler recursion beyond the DH transform.
double kinetic_energy(const RobotModel& m, const DynamicParams& p, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& qd) {
  const double h = 1e-6;
  const auto Fp = frames(m, q + h * qd);
  const auto Fm = frames(m, q - h * qd);
  const auto F = frames(m, q);
  double K = 0.0;
  for (std::size_t i = 0; i < m.dof(); ++i) {
    const auto& l = p.per_link[i];
    const Eigen::Vector3d cp = Fp[i].topLeftCorner<3, 3>() * l.s + Fp[i].topRightCorner<3, 1>();
    const Eigen::Vector3d cm = Fm[i].topLeftCorner<3, 3>() * l.s + Fm[i].topRightCorner<3, 1>();
    const Eigen::Vector3d v = (cp - cm) / (2 * h);
    const Eigen::Matrix3d R = F[i].topLeftCorner<3, 3>();
    const Eigen::Matrix3d Rdot = (Fp[i].topLeftCorner<3, 3>() - Fm[i].topLeftCorner<3, 3>()) / (2 * h);
    const Eigen::Matrix3d W = Rdot * R.transpose();  // skew(omega)
    const Eigen::Vector3d w(W(2, 1), W(0, 2), W(1, 0));
    K += 0.5 * l.m * v.squaredNorm() + 0.5 * w.dot(R * l.inertia_matrix() * R.transpose() * w);
  }
  return K;
}

double potential_energy(const RobotModel& m, const DynamicParams& p, const Eigen::VectorXd& q) {
  const auto F = frames(m, q);
  double U = 0.0;
  for (std::size_t i = 0; i < m.dof(); ++i) {
    const auto& l = p.per_link[i];
    const Eigen::Vector3d c = F[i].topLeftCorner<3, 3>() * l.s + F[i].topRightCorner<3, 1>();
    U -= l.m * m.gravity.dot(c);
  }
  return U;
}

Eigen::MatrixXd mass_matrix(const RobotModel& m, const DynamicParams& p, const Eigen::VectorXd& q) {
  RobotModel free = m;
  free.gravity.setZero();
  const auto n = static_cast<Eigen::Index>(m.dof());
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index k = 0; k < n; ++k) M.col(k) = inverse_dynamics(free, p, q, z, Eigen::VectorXd::Unit(n, k));
  return M;
}

oracle::Link to_oracle(const LinkDynamicParams& l) {
  return {l.m, l.s.x(), l.s.y(), l.s.z(), l.inertia[0], l.inertia[1], l.inertia[2], l.f_c, l.f_v};
}

Eigen::VectorXd oracle_tau(const DynamicParams& p, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                           const Eigen::VectorXd& qdd) {
  const auto t = oracle::cylindrical_tau({to_oracle(p.per_link[0]), to_oracle(p.per_link[1]), to_oracle(p.per_link[2])},
                                         9.81, {q[0], q[1], q[2]}, {qd[0], qd[1], qd[2]},
                                         {qdd[0], qdd[1], qdd[2]});
  return vec({t[0], t[1], t[2]});
}

}  // namespace

TEST(LinkTransform, ZeroRowIsIdentity) {
  const Eigen::Matrix4d T = link_transform(DHLink{0, 0, 0, 0, JointKind::Revolute}, 0.0);
  EXPECT_TRUE(T.isApprox(Eigen::Matrix4d::Identity(), 0.0));
}

TEST(LinkTransform, PrismaticTwistedRow) {
  const Eigen::Matrix4d T = link_transform(DHLink{0, -std::numbers::pi / 2, 0, 0, JointKind::Prismatic}, 0.5);
  Eigen::Matrix4d expected;
  expected << 1, 0, 0, 0,
              0, 0, 1, 0,
              0, -1, 0, 0.5,
              0, 0, 0, 1;
  EXPECT_LT((T - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LinkTransform, RotationIsOrthonormal) {
  Rng r(11);
  for (int k = 0; k < 200; ++k) {
    const DHLink l{r(-2, 2), r(-4, 4), r(-2, 2), r(-4, 4), k % 2 ? JointKind::Prismatic : JointKind::Revolute};
    const Eigen::Matrix4d T = link_transform(l, r(-10, 10));
    const Eigen::Matrix3d R = T.topLeftCorner<3, 3>();
    EXPECT_LT((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
    EXPECT_EQ(T.row(3), Eigen::RowVector4d(0, 0, 0, 1));
  }
}

TEST(Friction, Examples) {
  LinkDynamicParams l;
  l.f_c = 1.0;
  l.f_v = 1.0;
  EXPECT_EQ(friction_torque(l, 2.0), 3.0);
  l.f_c = 0.5;
  l.f_v = 0.25;
  EXPECT_EQ(friction_torque(l, -2.0), -1.0);
  for (double fc : {-3.0, 0.0, 7.0}) {
    l.f_c = fc;
    EXPECT_EQ(friction_torque(l, 0.0), 0.0);
  }
}

TEST(Params, FlattenRoundTripAndNames) {
  Rng r(3);
  const DynamicParams p = random_params(r, 4);
  const auto flat = p.flatten();
  ASSERT_EQ(flat.size(), 48u);
  EXPECT_EQ(DynamicParams::unflatten(flat).flatten(), flat);
  EXPECT_EQ(flat[param_index(2, kSz)], p.per_link[2].s.z());
  EXPECT_EQ(flat[param_index(1, kIyz)], p.per_link[1].inertia[4]);
  EXPECT_EQ(param_name(param_index(2, kSz)), "link3.s_z");
  EXPECT_EQ(param_name(param_index(0, kIxz)), "link1.I_xz");
  for (std::size_t i = 0; i < 48; ++i) EXPECT_EQ(parse_param_name(param_name(i), 4), i);
  EXPECT_THROW(parse_param_name("link5.m", 4), std::invalid_argument);
  EXPECT_THROW(parse_param_name("link1.mass", 4), std::invalid_argument);
  EXPECT_THROW(DynamicParams::unflatten(std::vector<double>(13)), std::invalid_argument);
}

TEST(InverseDynamics, NoParametersNoTorque) {
  Rng r(5);
  const RobotModel m = mixed_robot();
  const DynamicParams p = DynamicParams::zeros(3);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd q = vec({r(-3, 3), r(-1, 1), r(-3, 3)});
    const Eigen::VectorXd tau = inverse_dynamics(m, p, q, q * 2, q * 3);
    EXPECT_EQ(tau, Eigen::VectorXd::Zero(3));
  }
}

TEST(InverseDynamics, FrictionOnlyExample) {
  DynamicParams p = DynamicParams::zeros(3);
  for (auto& l : p.per_link) {
    l.f_c = 1.0;
    l.f_v = 1.0;
  }
  const Eigen::VectorXd tau =
      inverse_dynamics(cylindrical::robot(), p, vec({0.3, 0.4, 0.5}), vec({2, 2, 2}), vec({0.1, -0.2, 0.3}));
  EXPECT_LT((tau - vec({3, 3, 3})).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(InverseDynamics, RejectsDimensionMismatch) {
  const RobotModel m = cylindrical::robot();
  const DynamicParams p = cylindrical::true_params();
  EXPECT_THROW(inverse_dynamics(m, p, vec({0, 0}), vec({0, 0, 0}), vec({0, 0, 0})), std::invalid_argument);
  EXPECT_THROW(inverse_dynamics(m, DynamicParams::zeros(2), vec({0, 0, 0}), vec({0, 0, 0}), vec({0, 0, 0})),
               std::invalid_argument);
}

TEST(InverseDynamics, CylindricalOracleAtRest) {
  Rng r(17);
  const RobotModel m = cylindrical::robot();
  for (int k = 0; k < 100; ++k) {
    DynamicParams p = random_params(r, 3, false);
    const Eigen::VectorXd q = vec({r(-3, 3), r(0, 1), r(0, 1)});
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
    EXPECT_LT(rel_err(inverse_dynamics(m, p, q, z, z), oracle_tau(p, q, z, z)), 1e-12);
  }
}

TEST(InverseDynamics, CylindricalOracleMoving) {
  Rng r(19);
  const RobotModel m = cylindrical::robot();
  for (int k = 0; k < 300; ++k) {
    const DynamicParams p = random_params(r, 3);
    const Eigen::VectorXd q = vec({r(-3, 3), r(-1, 1), r(-1, 1)});
    const Eigen::VectorXd qd = vec({r(-3, 3), r(-3, 3), r(-3, 3)});
    const Eigen::VectorXd qdd = vec({r(-3, 3), r(-3, 3), r(-3, 3)});
    EXPECT_LT(rel_err(inverse_dynamics(m, p, q, qd, qdd), oracle_tau(p, q, qd, qdd)), 1e-12);
  }
}

TEST(InverseDynamics, BundledParametersMatchOracle) {
  const RobotModel m = cylindrical::robot();
  for (const DynamicParams& p : {cylindrical::true_params(), cylindrical::simplified_params()}) {
    const Eigen::VectorXd q = vec({0.7, 0.3, 0.6}), qd = vec({-0.4, 0.8, 1.1}), qdd = vec({0.5, -1.2, 0.9});
    EXPECT_LT(rel_err(inverse_dynamics(m, p, q, qd, qdd), oracle_tau(p, q, qd, qdd)), 1e-13);
  }
}

TEST(InverseDynamics, MassMatrixIsSymmetricPositiveDefinite) {
  Rng r(23);
  const RobotModel m = mixed_robot();
  for (int k = 0; k < 50; ++k) {
    const DynamicParams p = random_params(r, 3, false);
    const Eigen::MatrixXd M = mass_matrix(m, p, vec({r(-3, 3), r(-1, 1), r(-3, 3)}));
    EXPECT_LT((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-12 * M.norm());
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(InverseDynamics, KineticEnergyMatchesForwardKinematics) {
  Rng r(29);
  const RobotModel m = mixed_robot();
  for (int k = 0; k < 50; ++k) {
    const DynamicParams p = random_params(r, 3, false);
    const Eigen::VectorXd q = vec({r(-3, 3), r(-1, 1), r(-3, 3)});
    const Eigen::VectorXd qd = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const double K = 0.5 * qd.dot(mass_matrix(m, p, q) * qd);
    EXPECT_NEAR(K, kinetic_energy(m, p, q, qd), 1e-6 * std::max(1.0, K));
  }
}

TEST(InverseDynamics, GravityLoadIsPotentialGradient) {
  Rng r(31);
  const RobotModel m = mixed_robot();
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const DynamicParams p = random_params(r, 3, false);
    const Eigen::VectorXd q = vec({r(-3, 3), r(-1, 1), r(-3, 3)});
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
    const Eigen::VectorXd g = inverse_dynamics(m, p, q, z, z);
    for (Eigen::Index j = 0; j < 3; ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(3, j) * h;
      const double dU = (potential_energy(m, p, q + e) - potential_energy(m, p, q - e)) / (2 * h);
      EXPECT_NEAR(g[j], dU, 1e-6 * std::max(1.0, g.norm()));
    }
  }
}

// tau - tau(I = 0) scales with lambda when only inertia and friction move.
TEST(InverseDynamicsProperty, LinearInInertiaAndFriction) {
  Rng r(37);
  const RobotModel m = mixed_robot();
  for (int k = 0; k < 100; ++k) {
    const DynamicParams p = random_params(r, 3);
    DynamicParams zeroed = p;
    for (auto& l : zeroed.per_link) {
      l.inertia.fill(0.0);
      l.f_c = l.f_v = 0.0;
    }
    const double lambda = r(0.1, 3.0);
    DynamicParams scaled = p;
    for (auto& l : scaled.per_link) {
      for (double& v : l.inertia) v *= lambda;
      l.f_c *= lambda;
      l.f_v *= lambda;
    }
    const Eigen::VectorXd q = vec({r(-3, 3), r(-1, 1), r(-3, 3)});
    const Eigen::VectorXd qd = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const Eigen::VectorXd qdd = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const Eigen::VectorXd base = inverse_dynamics(m, zeroed, q, qd, qdd);
    const Eigen::VectorXd d1 = inverse_dynamics(m, p, q, qd, qdd) - base;
    const Eigen::VectorXd dl = inverse_dynamics(m, scaled, q, qd, qdd) - base;
    EXPECT_LT(rel_err(dl, lambda * d1), 1e-10);
  }
}

TEST(InverseDynamicsProperty, AffineInAcceleration) {
  Rng r(41);
  const RobotModel m = mixed_robot();
  for (int k = 0; k < 100; ++k) {
    const DynamicParams p = random_params(r, 3);
    const Eigen::VectorXd q = vec({r(-3, 3), r(-1, 1), r(-3, 3)});
    const Eigen::VectorXd qd = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const Eigen::VectorXd a = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const Eigen::VectorXd b = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const Eigen::VectorXd t0 = inverse_dynamics(m, p, q, qd, Eigen::VectorXd::Zero(3));
    const Eigen::VectorXd lhs = inverse_dynamics(m, p, q, qd, a + b) - t0;
    const Eigen::VectorXd rhs =
        (inverse_dynamics(m, p, q, qd, a) - t0) + (inverse_dynamics(m, p, q, qd, b) - t0);
    EXPECT_LT(rel_err(lhs, rhs), 1e-10);
  }
}

TEST(InverseDynamicsProperty, GravityOffAtRestIsExactlyZero) {
  Rng r(43);
  RobotModel m = mixed_robot();
  m.gravity.setZero();
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  for (int k = 0; k < 100; ++k) {
    DynamicParams p = random_params(r, 3);
    for (auto& l : p.per_link) l.f_c = r(-5, 5);
    EXPECT_EQ(inverse_dynamics(m, p, vec({r(-3, 3), r(-1, 1), r(-3, 3)}), z, z), z);
  }
}

// Parameters the cylindrical robot cannot feel leave the torques bit-identical.
TEST(InverseDynamicsProperty, AbsentCylindricalParametersContributeNothing) {
  Rng r(47);
  const RobotModel m = cylindrical::robot();
  const std::size_t absent[] = {param_index(0, kSz), param_index(0, kIxx), param_index(0, kIyy),
                                param_index(0, kIxy), param_index(0, kIyz), param_index(0, kIxz),
                                param_index(1, kIxx), param_index(1, kIzz), param_index(2, kIxx)};
  for (int k = 0; k < 50; ++k) {
    const DynamicParams p = random_params(r, 3);
    auto flat = p.flatten();
    const Eigen::VectorXd q = vec({r(-3, 3), r(-1, 1), r(-1, 1)});
    const Eigen::VectorXd qd = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const Eigen::VectorXd qdd = vec({r(-2, 2), r(-2, 2), r(-2, 2)});
    const Eigen::VectorXd tau = inverse_dynamics(m, p, q, qd, qdd);
    for (std::size_t idx : absent) flat[idx] += r(-3, 3);
    EXPECT_EQ(inverse_dynamics(m, DynamicParams::unflatten(flat), q, qd, qdd), tau);
  }
}
