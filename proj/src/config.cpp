#include "swarmid/config.hpp"

#include <cmath>

#include "swarmid/io.hpp"

namespace swarmid {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in '" + where + "'");
  }
}

double get_number(const json& j, const char* key, const std::string& where, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return j[key].get<double>();
}

std::size_t get_count(const json& j, const char* key, const std::string& where, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned())
    throw ConfigError("'" + where + "." + key + "' must be a non-negative integer");
  return j[key].get<std::size_t>();
}

Interval get_interval(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("'" + where + "' must be [min, max]");
  return {j[0].get<double>(), j[1].get<double>()};
}

RobotModel parse_robot(const json& j) {
  reject_unknown(j, {"links", "gravity"}, "robot");
  RobotModel m;
  if (j.contains("gravity")) {
    const json& g = j["gravity"];
    if (!g.is_array() || g.size() != 3) throw ConfigError("'robot.gravity' must be [gx, gy, gz]");
    for (int k = 0; k < 3; ++k) {
      if (!g[k].is_number()) throw ConfigError("'robot.gravity' must be [gx, gy, gz]");
      m.gravity[k] = g[k].get<double>();
    }
  }
  if (!j.contains("links") || !j["links"].is_array() || j["links"].empty())
    throw ConfigError("'robot.links' must be a non-empty array");
  for (std::size_t k = 0; k < j["links"].size(); ++k) {
    const json& jl = j["links"][k];
    const std::string where = "robot.links[" + std::to_string(k) + "]";
    reject_unknown(jl, {"joint", "a", "alpha", "d", "theta"}, where);
    DHLink l;
    l.a = get_number(jl, "a", where, 0.0);
    l.alpha = get_number(jl, "alpha", where, 0.0);
    l.d = get_number(jl, "d", where, 0.0);
    l.theta_offset = get_number(jl, "theta", where, 0.0);
    const std::string kind = jl.value("joint", "");
    if (kind == "revolute") l.joint_kind = JointKind::Revolute;
    else if (kind == "prismatic") l.joint_kind = JointKind::Prismatic;
    else throw ConfigError("'" + where + ".joint' must be \"revolute\" or \"prismatic\"");
    m.links.push_back(l);
  }
  return m;
}

JointConstraints parse_constraints(const json& j) {
  reject_unknown(j, {"margin", "joints"}, "constraints");
  JointConstraints c;
  c.margin = get_number(j, "margin", "constraints", c.margin);
  if (!j.contains("joints") || !j["joints"].is_array() || j["joints"].empty())
    throw ConfigError("'constraints.joints' must be a non-empty array");
  for (std::size_t k = 0; k < j["joints"].size(); ++k) {
    const json& jj = j["joints"][k];
    const std::string where = "constraints.joints[" + std::to_string(k) + "]";
    reject_unknown(jj, {"q", "qd", "qdd"}, where);
    for (const char* key : {"q", "qd", "qdd"})
      if (!jj.contains(key)) throw ConfigError("'" + where + "' is missing '" + key + "'");
    c.joints.push_back({get_interval(jj["q"], where + ".q"), get_interval(jj["qd"], where + ".qd"),
                        get_interval(jj["qdd"], where + ".qdd")});
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

PsoConfig parse_pso(const json& j, const std::string& where) {
  reject_unknown(j, {"swarm_size", "iterations", "c1", "c2", "w", "w_final", "vmax_fraction", "boundary", "threads"},
                 where);
  PsoConfig p;
  p.swarm_size = get_count(j, "swarm_size", where, p.swarm_size);
  p.iterations = get_count(j, "iterations", where, p.iterations);
  p.c1 = get_number(j, "c1", where, p.c1);
  p.c2 = get_number(j, "c2", where, p.c2);
  p.w = get_number(j, "w", where, p.w);
  if (j.contains("w_final")) {
    p.linear_inertia_decay = true;
    p.w_final = get_number(j, "w_final", where, p.w_final);
  }
  p.vmax_fraction = get_number(j, "vmax_fraction", where, p.vmax_fraction);
  if (j.contains("boundary")) {
    const std::string b = j["boundary"].is_string() ? j["boundary"].get<std::string>() : "";
    if (b == "clip") p.boundary = BoundaryMode::Clip;
    else if (b == "reflect") p.boundary = BoundaryMode::Reflect;
    else throw ConfigError("'" + where + ".boundary' must be \"clip\" or \"reflect\"");
  }
  p.threads = static_cast<int>(get_count(j, "threads", where, 0));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return p;
}

PlannerSettings parse_planner(const json& j) {
  reject_unknown(j, {"start", "frequency_limit", "duration", "samples", "grid", "objective", "pso"}, "planner");
  PlannerSettings p;
  if (j.contains("start")) {
    if (!j["start"].is_array()) throw ConfigError("'planner.start' must be an array");
    for (const json& v : j["start"]) {
      if (!v.is_number()) throw ConfigError("'planner.start' must hold numbers");
      p.start.push_back(v.get<double>());
    }
  }
  p.frequency_limit = get_number(j, "frequency_limit", "planner", p.frequency_limit);
  p.duration = get_number(j, "duration", "planner", p.duration);
  p.excitation.samples = get_count(j, "samples", "planner", p.excitation.samples);
  p.excitation.grid = get_count(j, "grid", "planner", p.excitation.grid);
  if (j.contains("objective")) {
    const std::string mode = j["objective"].is_string() ? j["objective"].get<std::string>() : "";
    if (mode == "stable") p.excitation.mode = ObjectiveMode::Stable;
    else if (mode == "faithful") p.excitation.mode = ObjectiveMode::Faithful;
    else throw ConfigError("'planner.objective' must be \"stable\" or \"faithful\"");
  }
  if (j.contains("pso")) p.pso = parse_pso(j["pso"], "planner.pso");
  if (!(p.frequency_limit > 0.0)) throw ConfigError("'planner.frequency_limit' must be positive");
  if (!(p.duration > 0.0)) throw ConfigError("'planner.duration' must be positive");
  if (p.excitation.samples < 1) throw ConfigError("'planner.samples' must be >= 1");
  if (p.excitation.grid < p.excitation.samples)
    throw ConfigError("'planner.grid' must be at least 'planner.samples'");
  return p;
}

SamplingSettings parse_sampling(const json& j) {
  reject_unknown(j, {"count", "duration", "noise_level"}, "sampling");
  SamplingSettings s;
  s.count = get_count(j, "count", "sampling", s.count);
  s.duration = get_number(j, "duration", "sampling", s.duration);
  s.noise_level = get_number(j, "noise_level", "sampling", s.noise_level);
  if (s.count < 1) throw ConfigError("'sampling.count' must be >= 1");
  if (!(s.duration > 0.0)) throw ConfigError("'sampling.duration' must be positive");
  if (!(s.noise_level >= 0.0)) throw ConfigError("'sampling.noise_level' must be >= 0");
  return s;
}

EstimatorSettings parse_estimator(const json& j, std::size_t dof) {
  reject_unknown(j, {"pso", "ranges", "free", "fixed", "norm"}, "estimator");
  EstimatorSettings e;
  if (j.contains("pso")) e.pso = parse_pso(j["pso"], "estimator.pso");
  if (j.contains("ranges")) {
    const json& r = j["ranges"];
    reject_unknown(r, {"mass", "com", "inertia", "friction"}, "estimator.ranges");
    if (r.contains("mass")) e.ranges.mass = get_interval(r["mass"], "estimator.ranges.mass");
    if (r.contains("com")) e.ranges.com = get_interval(r["com"], "estimator.ranges.com");
    if (r.contains("inertia")) e.ranges.inertia = get_interval(r["inertia"], "estimator.ranges.inertia");
    if (r.contains("friction")) e.ranges.friction = get_interval(r["friction"], "estimator.ranges.friction");
    for (const Interval* iv : {&e.ranges.mass, &e.ranges.com, &e.ranges.inertia, &e.ranges.friction})
      if (!(iv->lower < iv->upper)) throw ConfigError("'estimator.ranges' intervals need min < max");
  }
  if (j.contains("free")) {
    if (!j["free"].is_array() || j["free"].empty())
      throw ConfigError("'estimator.free' must be a non-empty array of parameter names");
    for (const json& name : j["free"]) {
      if (!name.is_string()) throw ConfigError("'estimator.free' must hold parameter names");
      try {
        e.free.push_back(parse_param_name(name.get<std::string>(), dof));
      } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("'estimator.free': ") + err.what());
      }
    }
  }
  if (j.contains("fixed")) {
    try {
      e.fixed = params_from_json(j["fixed"]);
    } catch (const IoError& err) {
      throw ConfigError(std::string("'estimator.fixed': ") + err.what());
    }
    if (e.fixed->dof() != dof) throw ConfigError("'estimator.fixed' must list one entry per robot link");
  }
  if (j.contains("norm")) {
    const std::string n = j["norm"].is_string() ? j["norm"].get<std::string>() : "";
    if (n == "frobenius") e.norm = CostNorm::Frobenius;
    else if (n == "spectral") e.norm = CostNorm::Spectral;
    else throw ConfigError("'estimator.norm' must be \"frobenius\" or \"spectral\"");
  }
  return e;
}

ClassifySettings parse_classification(const json& j) {
  reject_unknown(j, {"runs", "cv_threshold", "sensitivity_threshold", "probe_delta", "probe_floor"},
                 "classification");
  ClassifySettings c;
  c.runs = get_count(j, "runs", "classification", c.runs);
  c.cv_threshold = get_number(j, "cv_threshold", "classification", c.cv_threshold);
  c.sens_threshold = get_number(j, "sensitivity_threshold", "classification", c.sens_threshold);
  c.probe_delta = get_number(j, "probe_delta", "classification", c.probe_delta);
  c.probe_floor = get_number(j, "probe_floor", "classification", c.probe_floor);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

FourierTrajectory parse_trajectory(const json& j, const std::string& where) {
  try {
    return trajectory_from_json(j);
  } catch (const IoError& e) {
    throw ConfigError("'" + where + "': " + e.what());
  }
}

void check_dof(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want)
    throw ConfigError(what + " describes " + std::to_string(got) + " joints but the robot has " +
                      std::to_string(want));
}

}  // namespace

EstimationOptions EstimatorSettings::options(std::size_t dof) const {
  EstimationOptions o;
  o.norm = norm;
  if (!free.empty() || fixed) {
    ParameterSubset s = ParameterSubset::all(dof);
    if (!free.empty()) s.free = free;
    if (fixed) s.base = *fixed;
    o.subset = s;
  }
  return o;
}

SearchBox EstimatorSettings::box(std::size_t dof) const {
  const SearchBox full = ranges.box(dof);
  if (free.empty()) return full;
  ParameterSubset s;
  s.free = free;
  return restrict_box(full, s);
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j,
                 {"seed", "output_dir", "robot", "true_params", "constraints", "trajectory", "planner",
                  "sampling", "estimator", "classification", "verification"},
                 "config");
  ExperimentConfig c;
  try {
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
      if (!j["output_dir"].is_string()) throw ConfigError("'output_dir' must be a string");
      c.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("robot")) c.robot = parse_robot(j["robot"]);
    const std::size_t dof = c.robot ? c.robot->dof() : 0;

    if (j.contains("true_params")) {
      try {
        c.true_params = params_from_json(j["true_params"]);
      } catch (const IoError& e) {
        throw ConfigError(std::string("'true_params': ") + e.what());
      }
    }
    if (j.contains("constraints")) c.constraints = parse_constraints(j["constraints"]);
    if (j.contains("trajectory") && j.contains("planner"))
      throw ConfigError("give either 'trajectory' or 'planner', not both");
    if (j.contains("trajectory")) c.trajectory = parse_trajectory(j["trajectory"], "trajectory");
    if (j.contains("planner")) c.planner = parse_planner(j["planner"]);
    if (j.contains("sampling")) c.sampling = parse_sampling(j["sampling"]);
    if (j.contains("estimator")) {
      if (!c.robot) throw ConfigError("'estimator' needs a 'robot' section");
      c.estimator = parse_estimator(j["estimator"], dof);
    }
    if (j.contains("classification")) c.classification = parse_classification(j["classification"]);
    if (j.contains("verification")) {
      const json& v = j["verification"];
      reject_unknown(v, {"trajectory", "count"}, "verification");
      if (v.contains("trajectory"))
        c.verification.trajectory = parse_trajectory(v["trajectory"], "verification.trajectory");
      c.verification.count = get_count(v, "count", "verification", c.verification.count);
      if (c.verification.count < 1) throw ConfigError("'verification.count' must be >= 1");
    }

    if (c.planner) {
      if (!c.constraints) throw ConfigError("'planner' needs a 'constraints' section");
      if (c.planner->start.empty())
        for (const JointLimits& l : c.constraints->joints) c.planner->start.push_back(0.5 * (l.q.lower + l.q.upper));
      check_dof(c.planner->start.size(), c.constraints->dof(), "'planner.start'");
      for (std::size_t k = 0; k < c.planner->start.size(); ++k) {
        const Interval& q = c.constraints->joints[k].q;
        if (!(c.planner->start[k] >= q.lower && c.planner->start[k] <= q.upper))
          throw ConfigError("'planner.start' of joint " + std::to_string(k + 1) +
                            " lies outside its position bounds");
      }
    }
    if (c.robot) {
      if (c.true_params) check_dof(c.true_params->dof(), dof, "'true_params'");
      if (c.constraints) check_dof(c.constraints->dof(), dof, "'constraints'");
      if (c.trajectory) check_dof(c.trajectory->dof(), dof, "'trajectory'");
      if (c.verification.trajectory) check_dof(c.verification.trajectory->dof(), dof, "'verification.trajectory'");
    }
    if (c.sampling) {
      const double T = c.trajectory ? c.trajectory->duration : c.planner ? c.planner->duration : c.sampling->duration;
      if (!j["sampling"].contains("duration")) c.sampling->duration = T;
      if (T != c.sampling->duration)
        throw ConfigError("'sampling.duration' (" + format_number(c.sampling->duration) +
                          ") does not match the trajectory duration (" + format_number(T) + ")");
    }
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = read_json(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) {
  return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

}  // namespace swarmid
