#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace swarmid {

/// What happens to a particle that leaves the box: Clip stops it on the wall
/// and zeroes the offending velocity component; Reflect mirrors the position
/// back inside and reverses that component.
enum class BoundaryMode { Clip, Reflect };

/// Hyperparameters of the particle swarm. Defaults follow the usual
/// identification setting: 20 particles, 100 iterations, c1 = c2 = 1.3 and
/// a constant inertia weight of 0.6.
struct PsoConfig {
  std::size_t swarm_size = 20;
  std::size_t iterations = 100;
  double c1 = 1.3;
  double c2 = 1.3;
  double w = 0.6;
  std::uint64_t seed = 1;
  double vmax_fraction = 0.5;
  BoundaryMode boundary = BoundaryMode::Clip;
  // When set, the inertia weight decays linearly from w to w_final.
  bool linear_inertia_decay = false;
  double w_final = 0.4;
  // OpenMP worker count for objective evaluation; 0 uses the runtime default.
  int threads = 0;

  void validate() const;
};

struct SearchBox {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
  void validate() const;
};

struct Objective {
  std::size_t dimension = 0;
  // Must be safe to call concurrently. NaN results are treated as +inf.
  std::function<double(std::span<const double>)> evaluate;
};

struct PsoResult {
  std::vector<double> best_position;
  double best_value = 0.0;
  // Swarm-best value after each iteration; size == iterations.
  std::vector<double> history;
};

/// Snapshot handed to an observer after every position update.
struct SwarmState {
  std::size_t iteration = 0;
  const std::vector<std::vector<double>>& positions;
  const std::vector<std::vector<double>>& velocities;
};

struct PsoOptions {
  // Explicit starting positions for the first particles (clipped to the box).
  // Remaining particles start uniformly in the box. All start at rest.
  std::vector<std::vector<double>> initial_positions;
  std::function<void(const SwarmState&)> observer;
};

/// Bounded global-best PSO (minimization). Objective evaluations within an
/// iteration run on OpenMP workers; results are bit-identical for any worker
/// count because every particle owns a generator derived from the seed.
PsoResult minimize(const Objective& objective, const SearchBox& box, const PsoConfig& config,
                   const PsoOptions& options = {});

/// Single-threaded reference with the same update rule, kept to check the
/// parallel path.
PsoResult minimize_serial(const Objective& objective, const SearchBox& box,
                          const PsoConfig& config, const PsoOptions& options = {});

/// SplitMix64 finalizer, used to derive independent per-stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace swarmid
