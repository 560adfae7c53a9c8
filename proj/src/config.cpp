#include "qvdp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qvdp/error.hpp"

namespace qvdp {

namespace {

const std::vector<std::string> kKeys{"delta", "kappa",   "gain",   "eta",     "eps",
                                     "eps_scaled", "dim", "t_end", "rtol",   "atol",
                                     "seed",  "n_traj",  "grid_n", "grid_radius",
                                     "workers", "tasks"};

[[noreturn]] void fail(std::string_view key, const std::string& what) {
  throw Error(Errc::config, std::string(key) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(key, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

long long to_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(key, "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Task to_task(std::string_view key, std::string_view name) {
  if (name == "gaps") return Task::gaps;
  if (name == "steady") return Task::steady;
  if (name == "evolve") return Task::evolve;
  if (name == "classical") return Task::classical;
  fail(key, "unknown task '" + std::string(name) + "'");
}

// Every value arrives as text so both syntaxes share one code path.
void assign(RunConfig& c, const std::string& key, std::string_view value) {
  if (key == "delta") c.delta = to_real(key, value);
  else if (key == "kappa") c.kappa = to_real(key, value);
  else if (key == "gain") c.gain = to_real(key, value);
  else if (key == "eta") c.eta = parse_real_list(key, value);
  else if (key == "eps") c.eps = parse_real_list(key, value);
  else if (key == "eps_scaled") c.eps_scaled = parse_real_list(key, value);
  else if (key == "dim") c.dim = static_cast<int>(to_integer(key, value));
  else if (key == "t_end") c.t_end = to_real(key, value);
  else if (key == "rtol") c.rtol = to_real(key, value);
  else if (key == "atol") c.atol = to_real(key, value);
  else if (key == "seed") {
    const auto v = to_integer(key, value);
    if (v < 0) fail(key, "must be non-negative");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "n_traj") c.n_traj = static_cast<int>(to_integer(key, value));
  else if (key == "grid_n") c.grid_n = static_cast<int>(to_integer(key, value));
  else if (key == "grid_radius") c.grid_radius = to_real(key, value);
  else if (key == "workers") c.workers = static_cast<int>(to_integer(key, value));
  else if (key == "tasks") {
    c.tasks.clear();
    for (const auto t : split(value, ',')) c.tasks.push_back(to_task(key, t));
  } else {
    fail(key, "unknown key");
  }
}

std::string json_scalar_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  fail(key, "unsupported JSON value");
}

}  // namespace

std::string_view task_name(Task t) {
  switch (t) {
    case Task::gaps: return "gaps";
    case Task::steady: return "steady";
    case Task::evolve: return "evolve";
    case Task::classical: return "classical";
  }
  return "?";
}

std::vector<double> parse_real_list(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text.empty()) fail(key, "empty list");
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) fail(key, "range must be start:stop:step");
    const double a = to_real(key, parts[0]);
    const double b = to_real(key, parts[1]);
    const double h = to_real(key, parts[2]);
    if (!(h > 0.0) || b < a) fail(key, "range needs step > 0 and stop >= start");
    const auto n = static_cast<long long>(std::floor((b - a) / h + 0.5));
    if (n > 1000000) fail(key, "range too long");
    std::vector<double> out;
    for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
    return out;
  }
  std::vector<double> out;
  for (const auto part : split(text, ',')) out.push_back(to_real(key, part));
  return out;
}

void RunConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(delta)) fail("delta", "must be finite");
  if (!finite(kappa) || kappa < 0) fail("kappa", "must be >= 0, got " + std::to_string(kappa));
  if (!finite(gain) || gain < 0) fail("gain", "must be >= 0, got " + std::to_string(gain));
  if (eta.empty()) fail("eta", "needs at least one value");
  for (const double e : eta) {
    if (!finite(e) || e <= 0) fail("eta", "values must be > 0, got " + std::to_string(e));
  }
  if (!eps.empty() && !eps_scaled.empty()) fail("eps", "eps and eps_scaled are mutually exclusive");
  if (eps.empty() && eps_scaled.empty()) fail("eps_scaled", "one of eps or eps_scaled is required");
  for (const double e : eps) {
    if (!finite(e)) fail("eps", "values must be finite");
  }
  for (const double e : eps_scaled) {
    if (!finite(e) || e < 0) fail("eps_scaled", "values must be >= 0");
  }
  if (dim != 0 && dim < 2) fail("dim", "must be 0 (auto) or >= 2");
  if (!finite(t_end) || t_end <= 0) fail("t_end", "must be > 0");
  if (!finite(rtol) || rtol <= 0) fail("rtol", "must be > 0");
  if (!finite(atol) || atol <= 0) fail("atol", "must be > 0");
  if (n_traj < 1) fail("n_traj", "must be >= 1");
  if (grid_n < 3) fail("grid_n", "must be >= 3");
  if (!finite(grid_radius) || grid_radius < 0) fail("grid_radius", "must be >= 0");
  if (workers < 1) fail("workers", "must be >= 1");
  if (tasks.empty()) fail("tasks", "needs at least one task");
}

std::vector<SweepPoint> RunConfig::points() const {
  std::vector<SweepPoint> out;
  for (const double e : eta) {
    const std::vector<double>& drives = eps.empty() ? eps_scaled : eps;
    for (const double d : drives) {
      SweepPoint pt;
      pt.params.delta = delta;
      pt.params.kappa = kappa;
      pt.params.gain = gain;
      pt.params.eta = e;
      if (eps.empty()) pt.params.set_eps_scaled(d);
      else pt.params.eps = cplx(d, 0.0);
      pt.eps_scaled = pt.params.eps_scaled();
      pt.params.dim = dim > 0 ? dim : default_dimension(pt.params);
      out.push_back(pt);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SweepPoint& a, const SweepPoint& b) {
    if (a.params.eta != b.params.eta) return a.params.eta < b.params.eta;
    return a.eps_scaled < b.eps_scaled;
  });
  return out;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["delta"] = delta;
  j["kappa"] = kappa;
  j["gain"] = gain;
  j["eta"] = eta;
  if (!eps.empty()) j["eps"] = eps;
  if (!eps_scaled.empty()) j["eps_scaled"] = eps_scaled;
  j["dim"] = dim;
  j["t_end"] = t_end;
  j["rtol"] = rtol;
  j["atol"] = atol;
  j["seed"] = seed;
  j["n_traj"] = n_traj;
  j["grid_n"] = grid_n;
  j["grid_radius"] = grid_radius;
  j["workers"] = workers;
  std::vector<std::string> names;
  for (const Task t : tasks) names.emplace_back(task_name(t));
  j["tasks"] = names;
  return j;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::map<std::string, std::string> seen;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::config, std::string("json: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::config, "json: top level must be an object");
    for (const auto& [key, v] : j.items()) {
      std::string value;
      if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) value += ',';
          value += json_scalar_text(key, v[i]);
        }
      } else {
        value = json_scalar_text(key, v);
      }
      if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail(key, "unknown key");
      seen[key] = value;
    }
  } else {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view s = line;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = trim(s);
      if (s.empty()) continue;
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) {
        throw Error(Errc::config, "line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key(trim(s.substr(0, eq)));
      if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail(key, "unknown key");
      if (seen.count(key)) fail(key, "given twice");
      seen[key] = std::string(trim(s.substr(eq + 1)));
    }
  }
  for (const auto& [key, value] : seen) assign(c, key, value);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace qvdp
