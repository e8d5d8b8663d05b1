#include "swarmid/pso.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace swarmid {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void PsoConfig::validate() const {
  if (swarm_size < 1) throw std::invalid_argument("pso: swarm_size must be >= 1");
  if (iterations < 1) throw std::invalid_argument("pso: iterations must be >= 1");
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw std::invalid_argument("pso: c1, c2 must be >= 0");
  if (!(w >= 0.0)) throw std::invalid_argument("pso: w must be >= 0");
  if (linear_inertia_decay && !(w_final >= 0.0))
    throw std::invalid_argument("pso: w_final must be >= 0");
  if (!(vmax_fraction > 0.0 && vmax_fraction <= 1.0))
    throw std::invalid_argument("pso: vmax_fraction must lie in (0, 1]");
  if (threads < 0) throw std::invalid_argument("pso: threads must be >= 0");
}

bool SearchBox::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
  return true;
}

void SearchBox::validate() const {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("search box: lower/upper must be non-empty and equal length");
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw std::invalid_argument("search box: bounds must be finite");
    if (!(lower[j] < upper[j]))
      throw std::invalid_argument("search box: lower < upper violated in dimension " +
                                  std::to_string(j));
  }
}

namespace {

// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f.evaluate(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

struct Swarm {
  std::vector<std::vector<double>> x, v, pbest;
  std::vector<double> fx, fpbest;
  std::vector<std::mt19937_64> rng;
  std::vector<double> gbest;
  double fgbest = std::numeric_limits<double>::infinity();
  std::vector<double> vmax;
};

Swarm init_swarm(const SearchBox& box, const PsoConfig& cfg, const PsoOptions& opt) {
  const std::size_t n = box.dim();
  Swarm s;
  s.x.assign(cfg.swarm_size, std::vector<double>(n));
  s.v.assign(cfg.swarm_size, std::vector<double>(n, 0.0));
  s.fx.assign(cfg.swarm_size, std::numeric_limits<double>::infinity());
  s.vmax.resize(n);
  for (std::size_t j = 0; j < n; ++j) s.vmax[j] = cfg.vmax_fraction * (box.upper[j] - box.lower[j]);

  const std::uint64_t base = splitmix64(cfg.seed);
  s.rng.reserve(cfg.swarm_size);
  for (std::size_t i = 0; i < cfg.swarm_size; ++i) {
    s.rng.emplace_back(splitmix64(base ^ splitmix64(i + 1)));
    for (std::size_t j = 0; j < n; ++j)
      s.x[i][j] = box.lower[j] + unit(s.rng[i]) * (box.upper[j] - box.lower[j]);
    if (i < opt.initial_positions.size()) {
      const auto& p = opt.initial_positions[i];
      if (p.size() != n) throw std::invalid_argument("pso: initial position has wrong dimension");
      for (std::size_t j = 0; j < n; ++j) s.x[i][j] = std::clamp(p[j], box.lower[j], box.upper[j]);
    }
  }
  return s;
}

double inertia_at(const PsoConfig& cfg, std::size_t iteration) {
  if (!cfg.linear_inertia_decay || cfg.iterations == 1) return cfg.w;
  const double frac = static_cast<double>(iteration - 1) / static_cast<double>(cfg.iterations - 1);
  return cfg.w + (cfg.w_final - cfg.w) * frac;
}

// Velocity and position update of one particle; touches only its own state.
void step_particle(Swarm& s, std::size_t i, const SearchBox& box, const PsoConfig& cfg, double w) {
  auto& x = s.x[i];
  auto& v = s.v[i];
  const auto& pb = s.pbest[i];
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r1 = unit(s.rng[i]);
    const double r2 = unit(s.rng[i]);
    double vj = w * v[j] + cfg.c1 * r1 * (pb[j] - x[j]) + cfg.c2 * r2 * (s.gbest[j] - x[j]);
    vj = std::clamp(vj, -s.vmax[j], s.vmax[j]);
    double xj = x[j] + vj;
    if (xj < box.lower[j] || xj > box.upper[j]) {
      const double wall = xj < box.lower[j] ? box.lower[j] : box.upper[j];
      if (cfg.boundary == BoundaryMode::Clip) {
        xj = wall;
        vj = 0.0;
      } else {
        // the clamp covers a bounce past the far wall
        xj = std::clamp(2.0 * wall - xj, box.lower[j], box.upper[j]);
        vj = -vj;
      }
    }
    x[j] = xj;
    v[j] = vj;
  }
}

void update_personal_best(Swarm& s, std::size_t i) {
  if (s.fx[i] < s.fpbest[i]) {
    s.fpbest[i] = s.fx[i];
    s.pbest[i] = s.x[i];
  }
}

// Lowest index wins ties, so the choice never depends on evaluation order.
void update_global_best(Swarm& s) {
  for (std::size_t i = 0; i < s.fpbest.size(); ++i) {
    if (s.fpbest[i] < s.fgbest || s.gbest.empty()) {
      s.fgbest = s.fpbest[i];
      s.gbest = s.pbest[i];
    }
  }
}

void check_inputs(const Objective& objective, const SearchBox& box, const PsoConfig& config) {
  config.validate();
  box.validate();
  if (!objective.evaluate) throw std::invalid_argument("pso: objective is empty");
  if (objective.dimension != box.dim())
    throw std::invalid_argument("pso: search box dimension " + std::to_string(box.dim()) +
                                " does not match objective arity " +
                                std::to_string(objective.dimension));
}

PsoResult finish(Swarm& s, std::vector<double> history) {
  PsoResult r;
  r.best_position = std::move(s.gbest);
  r.best_value = s.fgbest;
  r.history = std::move(history);
  return r;
}

}  // namespace

PsoResult minimize(const Objective& objective, const SearchBox& box, const PsoConfig& config,
                   const PsoOptions& options) {
  check_inputs(objective, box, config);
  Swarm s = init_swarm(box, config, options);
  const auto k = static_cast<std::int64_t>(config.swarm_size);
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();

#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t i = 0; i < k; ++i) s.fx[i] = safe_eval(objective, s.x[i]);
  s.pbest = s.x;
  s.fpbest = s.fx;
  update_global_best(s);

  std::vector<double> history;
  history.reserve(config.iterations);
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    const double w = inertia_at(config, it);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t i = 0; i < k; ++i) {
      step_particle(s, i, box, config, w);
      s.fx[i] = safe_eval(objective, s.x[i]);
      update_personal_best(s, i);
    }
    if (options.observer) options.observer(SwarmState{it, s.x, s.v});
    update_global_best(s);
    history.push_back(s.fgbest);
  }
  return finish(s, std::move(history));
}

PsoResult minimize_serial(const Objective& objective, const SearchBox& box,
                          const PsoConfig& config, const PsoOptions& options) {
  check_inputs(objective, box, config);
  Swarm s = init_swarm(box, config, options);

  for (std::size_t i = 0; i < config.swarm_size; ++i) s.fx[i] = safe_eval(objective, s.x[i]);
  s.pbest = s.x;
  s.fpbest = s.fx;
  update_global_best(s);

  std::vector<double> history;
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    const double w = inertia_at(config, it);
    for (std::size_t i = 0; i < config.swarm_size; ++i) {
      step_particle(s, i, box, config, w);
      s.fx[i] = safe_eval(objective, s.x[i]);
      update_personal_best(s, i);
    }
    if (options.observer) options.observer(SwarmState{it, s.x, s.v});
    update_global_best(s);
    history.push_back(s.fgbest);
  }
  return finish(s, std::move(history));
}

}  // namespace swarmid
