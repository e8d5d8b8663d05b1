#include "swarmid/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace swarmid {

SampleSet generate_samples(const RobotModel& model, const DynamicParams& true_params,
                           const FourierTrajectory& traj, std::size_t count, double noise_level,
                           std::uint64_t seed) {
  model.validate();
  traj.validate();
  if (traj.dof() != model.dof())
    throw std::invalid_argument("generate_samples: trajectory and robot dof differ");
  if (!(noise_level >= 0.0)) throw std::invalid_argument("generate_samples: noise_level must be >= 0");
  if (count < 1) throw std::invalid_argument("generate_samples: need at least one sample");

  std::mt19937_64 rng(splitmix64(seed));
  auto perturb = [&](Eigen::VectorXd& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
      v[k] *= 1.0 + noise_level * (2.0 * u - 1.0);
    }
  };

  SampleSet out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    Sample s;
    s.t = sample_time(traj.duration, count, i);
    JointState st = eval_trajectory(traj, s.t);
    s.tau = inverse_dynamics(model, true_params, st.q, st.qd, st.qdd);
    s.q = std::move(st.q);
    s.qd = std::move(st.qd);
    s.qdd = std::move(st.qdd);
    if (noise_level > 0.0) {
      perturb(s.q);
      perturb(s.qd);
      perturb(s.qdd);
      perturb(s.tau);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Eigen::MatrixXd prediction_error(const RobotModel& model, const DynamicParams& candidate,
                                 const SampleSet& samples) {
  const auto n = static_cast<Eigen::Index>(model.dof());
  if (candidate.dof() != model.dof())
    throw std::invalid_argument("prediction_error: candidate has wrong number of links");
  Eigen::MatrixXd E(n, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.tau.size() != n)
      throw std::invalid_argument("prediction_error: sample " + std::to_string(i + 1) +
                                  " does not match robot dof");
    E.col(static_cast<Eigen::Index>(i)) = s.tau - inverse_dynamics(model, candidate, s.q, s.qd, s.qdd);
  }
  return E;
}

double cost(const Eigen::MatrixXd& error, CostNorm norm) {
  if (error.size() == 0) return 0.0;
  if (norm == CostNorm::Frobenius) return error.norm();
  // largest singular value via the small n x n Gram matrix
  const Eigen::MatrixXd G = error * error.transpose();
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .maxCoeff();
  return std::sqrt(std::max(lmax, 0.0));
}

ParameterSubset ParameterSubset::all(std::size_t dof) {
  ParameterSubset s;
  s.free.resize(dof * LinkDynamicParams::kCount);
  std::iota(s.free.begin(), s.free.end(), std::size_t{0});
  s.base = DynamicParams::zeros(dof);
  return s;
}

DynamicParams ParameterSubset::expand(std::span<const double> reduced) const {
  if (reduced.size() != free.size())
    throw std::invalid_argument("parameter subset: reduced vector has wrong length");
  std::vector<double> flat = base.flatten();
  for (std::size_t k = 0; k < free.size(); ++k) flat.at(free[k]) = reduced[k];
  return DynamicParams::unflatten(flat);
}

std::vector<double> ParameterSubset::reduce(const DynamicParams& full) const {
  const std::vector<double> flat = full.flatten();
  std::vector<double> out(free.size());
  for (std::size_t k = 0; k < free.size(); ++k) out[k] = flat.at(free[k]);
  return out;
}

SearchBox ParameterRanges::box(std::size_t dof) const {
  SearchBox b;
  for (std::size_t i = 0; i < dof * LinkDynamicParams::kCount; ++i) {
    const std::size_t field = i % LinkDynamicParams::kCount;
    const Interval& r = field == kMass ? mass
                        : field <= kSz ? com
                        : field <= kIxz ? inertia
                                        : friction;
    b.lower.push_back(r.lower);
    b.upper.push_back(r.upper);
  }
  return b;
}

SearchBox restrict_box(const SearchBox& full, const ParameterSubset& subset) {
  SearchBox b;
  for (std::size_t idx : subset.free) {
    b.lower.push_back(full.lower.at(idx));
    b.upper.push_back(full.upper.at(idx));
  }
  return b;
}

EstimationRun estimate(const RobotModel& model, const SampleSet& samples, const SearchBox& box,
                       const PsoConfig& pso, const EstimationOptions& options) {
  model.validate();
  if (samples.empty()) throw std::invalid_argument("estimate: no samples");
  const ParameterSubset subset = options.subset ? *options.subset : ParameterSubset::all(model.dof());
  if (subset.base.dof() != model.dof())
    throw std::invalid_argument("estimate: subset base has wrong number of links");
  if (box.dim() != subset.free.size())
    throw std::invalid_argument("estimate: search box has " + std::to_string(box.dim()) +
                                " dimensions, expected " + std::to_string(subset.free.size()));

  Objective objective{subset.free.size(), [&](std::span<const double> x) {
                        return cost(prediction_error(model, subset.expand(x), samples), options.norm);
                      }};
  const PsoResult r = minimize(objective, box, pso);

  EstimationRun run;
  run.best_params = subset.expand(r.best_position);
  run.best_cost = r.best_value;
  run.history = r.history;
  run.seed = pso.seed;
  return run;
}

std::string to_string(Identifiability status) {
  switch (status) {
    case Identifiability::Identifiable: return "I";
    case Identifiability::SemiOrNearlyUnidentifiable: return "SI/NUI";
    case Identifiability::Unidentifiable: return "UI";
  }
  return "?";
}

void ClassifySettings::validate() const {
  if (runs < 2) throw std::invalid_argument("classify: statistics need at least 2 runs");
  if (!(cv_threshold >= 0.0) || !(sens_threshold >= 0.0) || !(probe_delta >= 0.0) ||
      !(probe_floor > 0.0))
    throw std::invalid_argument("classify: thresholds must be non-negative (probe floor positive)");
}

double sensitivity_probe(const RobotModel& model, const SampleSet& samples,
                         const DynamicParams& base, std::size_t param_index, double delta,
                         double floor, CostNorm norm) {
  std::vector<double> flat = base.flatten();
  if (param_index >= flat.size()) throw std::out_of_range("sensitivity_probe: bad parameter index");
  const double c0 = cost(prediction_error(model, base, samples), norm);
  const double value = flat[param_index];
  const double step = delta * std::max(std::abs(value), floor);
  const double denom = std::max(c0, 1e-12);

  double change = 0.0;
  for (double sign : {1.0, -1.0}) {
    flat[param_index] = value + sign * step;
    const double c = cost(prediction_error(model, DynamicParams::unflatten(flat), samples), norm);
    change = std::max(change, std::abs(c - c0) / denom);
  }
  return change;
}

EstimationReport classify(const RobotModel& model, const SampleSet& samples, const SearchBox& box,
                          const PsoConfig& pso, const ClassifySettings& settings,
                          const EstimationOptions& options,
                          const std::optional<DynamicParams>& truth) {
  settings.validate();
  const ParameterSubset subset = options.subset ? *options.subset : ParameterSubset::all(model.dof());

  EstimationReport report;
  for (std::size_t r = 1; r <= settings.runs; ++r) {
    PsoConfig cfg = pso;
    cfg.seed = pso.seed + r;
    try {
      report.runs.push_back(estimate(model, samples, box, cfg, options));
    } catch (const std::exception& e) {
      throw ClassificationError("classify: run " + std::to_string(r) + " failed: " + e.what(),
                                report.runs);
    }
  }

  report.best_run = 0;
  for (std::size_t r = 1; r < report.runs.size(); ++r)
    if (report.runs[r].best_cost < report.runs[report.best_run].best_cost) report.best_run = r;

  std::vector<std::vector<double>> flats;
  for (const auto& run : report.runs) flats.push_back(run.best_params.flatten());
  const std::size_t total = flats.front().size();
  const double R = static_cast<double>(report.runs.size());

  std::vector<double> mean_flat(total, 0.0);
  for (const auto& f : flats)
    for (std::size_t i = 0; i < total; ++i) mean_flat[i] += f[i] / R;
  report.mean_params = DynamicParams::unflatten(mean_flat);

  const std::vector<double> truth_flat = truth ? truth->flatten() : std::vector<double>{};
  const DynamicParams& best = report.runs[report.best_run].best_params;

  for (std::size_t idx : subset.free) {
    ParameterStats row;
    row.index = idx;
    row.name = param_name(idx);
    if (truth) row.true_value = truth_flat.at(idx);
    row.mean = mean_flat[idx];
    double lo = flats.front()[idx], hi = lo, ss = 0.0;
    for (const auto& f : flats) {
      lo = std::min(lo, f[idx]);
      hi = std::max(hi, f[idx]);
      ss += (f[idx] - row.mean) * (f[idx] - row.mean);
    }
    row.spread = hi - lo;
    const double sd = std::sqrt(ss / (R - 1.0));
    row.cv = sd == 0.0 ? 0.0
             : row.mean == 0.0 ? std::numeric_limits<double>::infinity()
                               : sd / std::abs(row.mean);

    if (row.cv <= settings.cv_threshold) {
      row.status = Identifiability::Identifiable;
    } else {
      row.sensitivity = sensitivity_probe(model, samples, best, idx, settings.probe_delta,
                                          settings.probe_floor, options.norm);
      row.status = *row.sensitivity > settings.sens_threshold
                       ? Identifiability::SemiOrNearlyUnidentifiable
                       : Identifiability::Unidentifiable;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

Verification verify(const RobotModel& model, const DynamicParams& true_params,
                    const DynamicParams& est_params, const FourierTrajectory& traj,
                    std::size_t count) {
  traj.validate();
  if (count < 1) throw std::invalid_argument("verify: need at least one interval");
  if (traj.dof() != model.dof()) throw std::invalid_argument("verify: trajectory and robot dof differ");
  const auto n = static_cast<Eigen::Index>(model.dof());

  Verification v;
  v.tau_true.resize(static_cast<Eigen::Index>(count + 1), n);
  v.tau_est.resize(static_cast<Eigen::Index>(count + 1), n);
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = sample_time(traj.duration, count, i);
    const JointState s = eval_trajectory(traj, t);
    v.t.push_back(t);
    v.tau_true.row(static_cast<Eigen::Index>(i)) = inverse_dynamics(model, true_params, s.q, s.qd, s.qdd);
    v.tau_est.row(static_cast<Eigen::Index>(i)) = inverse_dynamics(model, est_params, s.q, s.qd, s.qdd);
  }
  v.rms_relative.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double diff = (v.tau_est.col(j) - v.tau_true.col(j)).norm();
    const double ref = v.tau_true.col(j).norm();
    v.rms_relative[j] = diff == 0.0 ? 0.0 : ref == 0.0 ? std::numeric_limits<double>::infinity() : diff / ref;
  }
  return v;
}

}  // namespace swarmid
