#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pso_fixture.hpp"
#include "swarmid/pso.hpp"

using namespace swarmid;

namespace {

Objective sphere(std::size_t n) {
  return {n, [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
          }};
}

// Many local minima; a swarm with few particles rarely finds the global one,
// which makes trajectories sensitive to any change in the update order.
Objective rastrigin(std::size_t n) {
  return {n, [](std::span<const double> x) {
            double s = 10.0 * static_cast<double>(x.size());
            for (double v : x) s += v * v - 10.0 * std::cos(2.0 * M_PI * v);
            return s;
          }};
}

SearchBox cube(std::size_t n, double lo, double hi) {
  return {std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

PsoConfig config(std::uint64_t seed, std::size_t iterations = 100) {
  PsoConfig c;
  c.seed = seed;
  c.iterations = iterations;
  return c;
}

}  // namespace

TEST(Pso, HistoryHasOneEntryPerIterationAndNeverIncreases) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PsoConfig c = config(seed, 37);
    c.swarm_size = 1 + seed % 9;
    const PsoResult r = minimize(rastrigin(4), cube(4, -5.12, 5.12), c);
    ASSERT_EQ(r.history.size(), 37u);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
    EXPECT_EQ(r.history.back(), r.best_value);
    EXPECT_EQ(rastrigin(4).evaluate(r.best_position), r.best_value);
  }
}

TEST(Pso, SameSeedSameResult) {
  const PsoResult a = minimize(rastrigin(6), cube(6, -5.12, 5.12), config(99));
  const PsoResult b = minimize(rastrigin(6), cube(6, -5.12, 5.12), config(99));
  EXPECT_EQ(a.best_position, b.best_position);
  EXPECT_EQ(a.history, b.history);
  const PsoResult c = minimize(rastrigin(6), cube(6, -5.12, 5.12), config(100));
  EXPECT_NE(a.best_position, c.best_position);
}

TEST(Pso, WorkerCountDoesNotChangeBits) {
  for (BoundaryMode mode : {BoundaryMode::Clip, BoundaryMode::Reflect}) {
    PsoConfig c = config(2024, 60);
    c.boundary = mode;
    c.threads = 1;
    const PsoResult serial = minimize_serial(rastrigin(5), cube(5, -5.12, 5.12), c);
    for (int threads : {1, 2, 3, 4, 8}) {
      c.threads = threads;
      const PsoResult r = minimize(rastrigin(5), cube(5, -5.12, 5.12), c);
      EXPECT_EQ(r.best_position, serial.best_position) << threads << " threads";
      EXPECT_EQ(r.history, serial.history) << threads << " threads";
      EXPECT_EQ(r.best_value, serial.best_value);
    }
  }
}

TEST(Pso, ParticlesStayInBoxAndVelocityStaysCapped) {
  const SearchBox box{{-1.0, 0.0, 10.0}, {1.0, 0.5, 30.0}};
  for (BoundaryMode mode : {BoundaryMode::Clip, BoundaryMode::Reflect}) {
    for (double vmax : {0.05, 0.5, 1.0}) {
      PsoConfig c = config(7, 50);
      c.vmax_fraction = vmax;
      c.boundary = mode;
      c.c1 = c.c2 = 2.5;  // aggressive, to push particles against the walls
      c.w = 0.95;
      std::size_t snapshots = 0;
      PsoOptions opt;
      opt.observer = [&](const SwarmState& s) {
        ++snapshots;
        EXPECT_EQ(s.iteration, snapshots);
        for (std::size_t i = 0; i < s.positions.size(); ++i) {
          EXPECT_TRUE(box.contains(s.positions[i]));
          for (std::size_t j = 0; j < 3; ++j)
            EXPECT_LE(std::abs(s.velocities[i][j]), vmax * (box.upper[j] - box.lower[j]));
        }
      };
      // optimum outside the box on every axis
      Objective f{3, [](std::span<const double> x) { return -(x[0] + x[1] + x[2]); }};
      const PsoResult r = minimize(f, box, c, opt);
      EXPECT_EQ(snapshots, 50u);
      EXPECT_TRUE(box.contains(r.best_position));
    }
  }
}

TEST(Pso, SphereRegressionFixture) {
  const PsoResult r = minimize(sphere(3), cube(3, -5.0, 5.0), config(42));
  EXPECT_LT(r.best_value, 1e-3);
  EXPECT_NEAR(r.best_value, kSphereSeed42, 1e-9 * kSphereSeed42);
}

TEST(Pso, SphereConvergesForManySeeds) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed)
    EXPECT_LT(minimize(sphere(3), cube(3, -5.0, 5.0), config(seed)).best_value, 1e-3) << "seed " << seed;
}

TEST(Pso, SingleParticleAtOptimumNeverMoves) {
  PsoConfig c = config(3, 25);
  c.swarm_size = 1;
  PsoOptions opt;
  opt.initial_positions = {{0.0, 0.0, 0.0}};
  opt.observer = [](const SwarmState& s) {
    EXPECT_EQ(s.positions[0], std::vector<double>(3, 0.0));
    EXPECT_EQ(s.velocities[0], std::vector<double>(3, 0.0));
  };
  const PsoResult r = minimize(sphere(3), cube(3, -5.0, 5.0), c, opt);
  EXPECT_EQ(r.best_value, 0.0);
  EXPECT_EQ(r.best_position, std::vector<double>(3, 0.0));
}

TEST(Pso, InitialPositionsAreClippedIntoBox) {
  PsoConfig c = config(3, 1);
  PsoOptions opt;
  opt.initial_positions = {{9.0, -9.0}};
  Objective f{2, [](std::span<const double>) { return 1.0; }};
  c.swarm_size = 1;
  const PsoResult r = minimize_serial(f, cube(2, -1.0, 1.0), c, opt);
  EXPECT_EQ(r.best_position, (std::vector<double>{1.0, -1.0}));
}

TEST(Pso, ConstantObjectiveKeepsFirstParticle) {
  Objective f{2, [](std::span<const double>) { return 4.0; }};
  PsoConfig c = config(5, 10);
  PsoOptions opt;
  opt.initial_positions = {{0.25, -0.75}};
  const PsoResult r = minimize(f, cube(2, -1.0, 1.0), c, opt);
  EXPECT_EQ(r.history, std::vector<double>(10, 4.0));
  // no strict improvement ever happens, so the lowest-index start is kept
  EXPECT_EQ(r.best_position, (std::vector<double>{0.25, -0.75}));
}

TEST(Pso, NanIsWorseThanAnything) {
  Objective f{2, [](std::span<const double> x) {
                return x[0] < 0.0 ? std::numeric_limits<double>::quiet_NaN() : (x[0] - 0.5) * (x[0] - 0.5) + x[1] * x[1];
              }};
  const PsoResult r = minimize(f, cube(2, -1.0, 1.0), config(8));
  EXPECT_TRUE(std::isfinite(r.best_value));
  EXPECT_GE(r.best_position[0], 0.0);
  EXPECT_LT(r.best_value, 1e-4);
}

TEST(Pso, RejectsBadInput) {
  EXPECT_THROW(minimize(sphere(3), cube(2, -1, 1), config(1)), std::invalid_argument);
  EXPECT_THROW(minimize_serial(sphere(2), cube(2, 1, 1), config(1)), std::invalid_argument);
  EXPECT_THROW(minimize(sphere(2), SearchBox{{0.0, std::nan("")}, {1.0, 1.0}}, config(1)), std::invalid_argument);
  EXPECT_THROW(minimize(Objective{2, {}}, cube(2, -1, 1), config(1)), std::invalid_argument);
  PsoConfig c = config(1);
  c.swarm_size = 0;
  EXPECT_THROW(minimize(sphere(2), cube(2, -1, 1), c), std::invalid_argument);
  c = config(1, 0);
  EXPECT_THROW(minimize(sphere(2), cube(2, -1, 1), c), std::invalid_argument);
  c = config(1);
  c.vmax_fraction = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.vmax_fraction = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config(1);
  c.c1 = -0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config(1);
  c.w = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  PsoOptions opt;
  opt.initial_positions = {{0.0}};
  EXPECT_THROW(minimize(sphere(2), cube(2, -1, 1), config(1), opt), std::invalid_argument);
}

TEST(Pso, InertiaDecayStillDeterministicAndConvergent) {
  PsoConfig c = config(11, 200);
  c.linear_inertia_decay = true;
  c.w = 0.9;
  c.w_final = 0.4;
  const PsoResult a = minimize(sphere(4), cube(4, -5.0, 5.0), c);
  const PsoResult b = minimize_serial(sphere(4), cube(4, -5.0, 5.0), c);
  EXPECT_EQ(a.history, b.history);
  EXPECT_LT(a.best_value, 1e-6);
}
