#include "swarmid/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace swarmid {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

std::string numbered_header(const char* prefix, std::size_t n) {
  std::string h;
  for (std::size_t j = 1; j <= n; ++j) h += std::string(",") + prefix + std::to_string(j);
  return h;
}

void append_vector(std::string& line, const Eigen::VectorXd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) line += "," + format_number(v[k]);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_field(const std::string& text, const std::filesystem::path& path, std::size_t line_no) {
  std::size_t b = text.find_first_not_of(" \t");
  std::size_t e = text.find_last_not_of(" \t");
  if (b == std::string::npos) throw IoError(path.string() + ":" + std::to_string(line_no) + ": empty field");
  const char* first = text.data() + b;
  const char* last = text.data() + e + 1;
  if (*first == '+') ++first;
  double v = 0.0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": not a finite number: '" + text + "'");
  return v;
}

}  // namespace

void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples) {
  const std::size_t n = samples.empty() ? 0 : static_cast<std::size_t>(samples.front().q.size());
  std::string text = "t" + numbered_header("q", n) + numbered_header("qd", n) +
                     numbered_header("qdd", n) + numbered_header("tau", n) + "\n";
  for (const Sample& s : samples) {
    std::string line = format_number(s.t);
    append_vector(line, s.q);
    append_vector(line, s.qd);
    append_vector(line, s.qdd);
    append_vector(line, s.tau);
    text += line + "\n";
  }
  write_text(path, text);
}

SampleSet read_samples_csv(const std::filesystem::path& path, std::size_t dof) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open sample file " + path.string());
  const std::size_t width = 1 + 4 * dof;

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IoError(path.string() + ": no samples");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() != width)
    throw IoError(path.string() + ":1: header has " + std::to_string(header.size()) +
                  " columns, expected " + std::to_string(width) + " for a " + std::to_string(dof) +
                  "-joint robot");

  SampleSet out;
  const auto n = static_cast<Eigen::Index>(dof);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(width) + " columns, found " + std::to_string(fields.size()));
    Sample s;
    s.t = parse_field(fields[0], path, line_no);
    s.q.resize(n);
    s.qd.resize(n);
    s.qdd.resize(n);
    s.tau.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      s.q[j] = parse_field(fields[1 + j], path, line_no);
      s.qd[j] = parse_field(fields[1 + n + j], path, line_no);
      s.qdd[j] = parse_field(fields[1 + 2 * n + j], path, line_no);
      s.tau[j] = parse_field(fields[1 + 3 * n + j], path, line_no);
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw IoError(path.string() + ": no samples");
  return out;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<double>& history) {
  std::string text = "iteration,best_value\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    text += std::to_string(i + 1) + "," + format_number(history[i]) + "\n";
  write_text(path, text);
}

void write_verification_csv(const std::filesystem::path& path, const Verification& v) {
  const auto n = static_cast<std::size_t>(v.tau_true.cols());
  std::string text = "t" + numbered_header("tau_true_", n) + numbered_header("tau_est_", n) + "\n";
  for (std::size_t i = 0; i < v.t.size(); ++i) {
    std::string line = format_number(v.t[i]);
    const auto r = static_cast<Eigen::Index>(i);
    append_vector(line, v.tau_true.row(r).transpose());
    append_vector(line, v.tau_est.row(r).transpose());
    text += line + "\n";
  }
  write_text(path, text);
}

void write_trajectory_csv(const std::filesystem::path& path, const FourierTrajectory& traj,
                          std::size_t count) {
  std::string text = "t";
  for (std::size_t j = 1; j <= traj.dof(); ++j) {
    const std::string k = std::to_string(j);
    text += ",q" + k + ",qd" + k + ",qdd" + k;
  }
  text += "\n";
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = sample_time(traj.duration, count, i);
    const JointState s = eval_trajectory(traj, t);
    std::string line = format_number(t);
    for (Eigen::Index j = 0; j < s.q.size(); ++j)
      line += "," + format_number(s.q[j]) + "," + format_number(s.qd[j]) + "," + format_number(s.qdd[j]);
    text += line + "\n";
  }
  write_text(path, text);
}

void write_report_csv(const std::filesystem::path& path, const EstimationReport& report) {
  std::string text = "name,link,true_value,mean,cv,spread,sensitivity,status\n";
  for (const ParameterStats& r : report.rows) {
    text += r.name + "," + std::to_string(r.index / LinkDynamicParams::kCount + 1) + ",";
    text += (r.true_value ? format_number(*r.true_value) : "") + ",";
    text += format_number(r.mean) + "," + format_number(r.cv) + "," + format_number(r.spread) + ",";
    text += (r.sensitivity ? format_number(*r.sensitivity) : "") + ",";
    text += to_string(r.status) + "\n";
  }
  write_text(path, text);
}

namespace {

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw IoError(what + " must be an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw IoError("unknown key '" + key + "' in " + what);
  }
}

double number_at(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw IoError(what + " is missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw IoError(what + "." + key + " must be a number");
  return v.get<double>();
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw IoError(what + " must be a number");
  return v.get<double>();
}

}  // namespace

ordered_json trajectory_to_json(const FourierTrajectory& traj) {
  ordered_json j;
  j["duration"] = traj.duration;
  j["joints"] = ordered_json::array();
  for (const JointMotion& m : traj.joints) {
    ordered_json jm;
    jm["offset"] = m.offset;
    jm["terms"] = ordered_json::array();
    for (const SinusoidTerm& t : m.terms) jm["terms"].push_back({t.amplitude, t.frequency});
    j["joints"].push_back(jm);
  }
  return j;
}

FourierTrajectory trajectory_from_json(const json& j) {
  require_object(j, "trajectory");
  reject_unknown(j, {"duration", "joints"}, "trajectory");
  FourierTrajectory traj;
  traj.duration = number_at(j, "duration", "trajectory");
  if (!j.contains("joints") || !j["joints"].is_array() || j["joints"].empty())
    throw IoError("trajectory.joints must be a non-empty array");
  for (std::size_t k = 0; k < j["joints"].size(); ++k) {
    const json& jm = j["joints"][k];
    const std::string what = "trajectory.joints[" + std::to_string(k) + "]";
    require_object(jm, what);
    reject_unknown(jm, {"offset", "terms"}, what);
    JointMotion m;
    m.offset = number_at(jm, "offset", what);
    if (!jm.contains("terms") || !jm["terms"].is_array() || jm["terms"].size() != 3)
      throw IoError(what + ".terms must hold exactly 3 [amplitude, frequency] pairs");
    for (std::size_t t = 0; t < 3; ++t) {
      const json& pair = jm["terms"][t];
      if (!pair.is_array() || pair.size() != 2)
        throw IoError(what + ".terms[" + std::to_string(t) + "] must be [amplitude, frequency]");
      m.terms[t] = {number(pair[0], what + ".terms"), number(pair[1], what + ".terms")};
    }
    traj.joints.push_back(m);
  }
  try {
    traj.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  return traj;
}

ordered_json params_to_json(const DynamicParams& params) {
  ordered_json out = ordered_json::array();
  for (const LinkDynamicParams& l : params.per_link) {
    ordered_json j;
    j["m"] = l.m;
    j["s"] = {l.s.x(), l.s.y(), l.s.z()};
    ordered_json in;
    static const char* kInertia[] = {"xx", "yy", "zz", "xy", "yz", "xz"};
    for (int k = 0; k < 6; ++k) in[kInertia[k]] = l.inertia[k];
    j["inertia"] = in;
    j["f_c"] = l.f_c;
    j["f_v"] = l.f_v;
    out.push_back(j);
  }
  return out;
}

DynamicParams params_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw IoError("parameters must be a non-empty array of links");
  DynamicParams p;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& jl = j[k];
    const std::string what = "link " + std::to_string(k + 1) + " parameters";
    require_object(jl, what);
    reject_unknown(jl, {"m", "s", "inertia", "f_c", "f_v"}, what);
    LinkDynamicParams l;
    l.m = number_at(jl, "m", what);
    if (!jl.contains("s") || !jl["s"].is_array() || jl["s"].size() != 3)
      throw IoError(what + ".s must be [s_x, s_y, s_z]");
    for (int c = 0; c < 3; ++c) l.s[c] = number(jl["s"][c], what + ".s");
    if (!jl.contains("inertia")) throw IoError(what + " is missing 'inertia'");
    const json& in = jl["inertia"];
    require_object(in, what + ".inertia");
    reject_unknown(in, {"xx", "yy", "zz", "xy", "yz", "xz"}, what + ".inertia");
    static const char* kInertia[] = {"xx", "yy", "zz", "xy", "yz", "xz"};
    for (int c = 0; c < 6; ++c) l.inertia[c] = number_at(in, kInertia[c], what + ".inertia");
    l.f_c = number_at(jl, "f_c", what);
    l.f_v = number_at(jl, "f_v", what);
    for (double v : {l.m, l.s.x(), l.s.y(), l.s.z(), l.f_c, l.f_v})
      if (!std::isfinite(v)) throw IoError(what + " contains a non-finite value");
    p.per_link.push_back(l);
  }
  return p;
}

ordered_json run_to_json(const EstimationRun& run) {
  ordered_json j;
  j["seed"] = run.seed;
  j["best_cost"] = run.best_cost;
  j["params"] = params_to_json(run.best_params);
  return j;
}

ordered_json report_to_json(const EstimationReport& report) {
  ordered_json j;
  j["runs"] = report.runs.size();
  j["best_run"] = report.best_run + 1;
  j["run_costs"] = ordered_json::array();
  for (const auto& r : report.runs) j["run_costs"].push_back(r.best_cost);
  j["params"] = params_to_json(report.mean_params);
  j["rows"] = ordered_json::array();
  for (const ParameterStats& r : report.rows) {
    ordered_json row;
    row["name"] = r.name;
    row["link"] = r.index / LinkDynamicParams::kCount + 1;
    row["true_value"] = r.true_value ? ordered_json(*r.true_value) : ordered_json(nullptr);
    row["mean"] = r.mean;
    // JSON has no infinity; an unbounded CV is written as null
    row["cv"] = std::isfinite(r.cv) ? ordered_json(r.cv) : ordered_json(nullptr);
    row["spread"] = r.spread;
    row["sensitivity"] = r.sensitivity ? ordered_json(*r.sensitivity) : ordered_json(nullptr);
    row["status"] = to_string(r.status);
    j["rows"].push_back(row);
  }
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace swarmid
