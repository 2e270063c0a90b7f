#include "srn/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "srn/errors.hpp"

namespace srn {

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::flow, "flow"},
      {Experiment::gd, "gd"},
      {Experiment::figure_angle, "figure-angle"},
      {Experiment::figure_magnitude, "figure-magnitude"},
      {Experiment::reanchor, "reanchor"},
      {Experiment::lemma_verify, "lemma-verify"},
      {Experiment::error_scaling, "error-scaling"},
      {Experiment::stopping_time, "stopping-time"},
      {Experiment::deep_general, "deep-general"},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw ConfigError("key '" + key + "': expected " + want + ", got '" + value + "'");
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, value, "an integer");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    bad_value(key, value, "a real number");
  }
  if (pos != value.size() || !std::isfinite(out)) bad_value(key, value, "a real number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

template <class T>
T positive(const std::string& key, const std::string& value, T x) {
  if (!(x > T{0})) bad_value(key, value, "a positive value");
  return x;
}

}  // namespace

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& [e, name] : experiment_names()) v.push_back(e);
    return v;
  }();
  return all;
}

std::string to_string(Experiment e) {
  for (const auto& [x, name] : experiment_names()) {
    if (x == e) return name;
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [x, n] : experiment_names()) {
    if (n == name) return x;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "m",     "d",      "n",       "eta",          "steps",   "init_scale",
      "target_scale", "seed", "dt",    "t_end",   "output_dir",   "mode",    "anchors",
      "depth",      "width", "record_every", "eps", "configs",    "paper_scale"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment") {
    experiment = parse_experiment(value);
  } else if (key == "m") {
    const int v = parse_integer<int>(key, value);
    if (v < 0) bad_value(key, value, "a non-negative integer");
    m = v;
  } else if (key == "d") {
    d = positive(key, value, parse_integer<int>(key, value));
  } else if (key == "n") {
    n = positive(key, value, parse_integer<long long>(key, value));
  } else if (key == "eta") {
    eta = positive(key, value, parse_real(key, value));
  } else if (key == "steps") {
    steps = positive(key, value, parse_integer<long long>(key, value));
  } else if (key == "init_scale") {
    if (value == "small") {
      init = InitSpec{InitScale::small, 0.0};
    } else if (value == "middle") {
      init = InitSpec{InitScale::middle, 0.0};
    } else if (value == "large") {
      init = InitSpec{InitScale::large, 0.0};
    } else {
      init = InitSpec{InitScale::explicit_k, positive(key, value, parse_real(key, value))};
    }
  } else if (key == "target_scale") {
    target_scale = positive(key, value, parse_real(key, value));
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "dt") {
    dt = positive(key, value, parse_real(key, value));
  } else if (key == "t_end") {
    t_end = positive(key, value, parse_real(key, value));
  } else if (key == "output_dir") {
    if (value.empty()) bad_value(key, value, "a path");
    output_dir = value;
  } else if (key == "mode") {
    if (value == "population") {
      mode = DescentMode::population;
    } else if (value == "empirical") {
      mode = DescentMode::empirical;
    } else {
      bad_value(key, value, "population or empirical");
    }
  } else if (key == "anchors") {
    anchors.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      const auto a = parse_integer<long long>(key, t);
      if (a < 0) bad_value(key, value, "non-negative steps");
      anchors.push_back(a);
    }
    if (anchors.empty()) bad_value(key, value, "a comma-separated list of steps");
    if (!std::is_sorted(anchors.begin(), anchors.end())) bad_value(key, value, "ascending steps");
  } else if (key == "depth") {
    depth = positive(key, value, parse_integer<int>(key, value));
  } else if (key == "width") {
    width = positive(key, value, parse_integer<int>(key, value));
  } else if (key == "record_every") {
    record_every = positive(key, value, parse_integer<long long>(key, value));
  } else if (key == "eps") {
    eps = positive(key, value, parse_real(key, value));
  } else if (key == "configs") {
    configs = positive(key, value, parse_integer<int>(key, value));
  } else if (key == "paper_scale") {
    paper_scale = parse_bool(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

std::vector<std::string> required_keys(Experiment e) {
  switch (e) {
    case Experiment::flow: return {"m"};
    case Experiment::gd: return {"m", "eta", "steps"};
    case Experiment::figure_angle:
    case Experiment::figure_magnitude: return {"m", "init_scale"};
    case Experiment::reanchor: return {"m", "anchors"};
    case Experiment::lemma_verify: return {};
    case Experiment::error_scaling: return {};
    case Experiment::stopping_time: return {"m", "eps"};
    case Experiment::deep_general: return {"init_scale"};
  }
  return {};
}

void RunConfig::check_required() const {
  for (const auto& key : required_keys(experiment)) {
    const bool present = (key == "m" && m) || (key == "eta" && eta) || (key == "steps" && steps) ||
                         (key == "init_scale" && init) || (key == "anchors" && !anchors.empty()) ||
                         (key == "eps" && eps);
    if (!present) {
      throw ConfigError("experiment '" + to_string(experiment) + "' needs key '" + key + "'");
    }
  }
}

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_experiment = false;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError(where + "duplicate key '" + key + "'");
    }
    seen.push_back(key);
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    have_experiment = have_experiment || key == "experiment";
  }
  if (!have_experiment) throw ConfigError(source + ": missing key 'experiment'");
  try {
    cfg.check_required();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str(), path);
}

std::string render_run_config(const RunConfig& c) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "experiment = " << to_string(c.experiment) << "\n";
  if (c.m) o << "m = " << *c.m << "\n";
  if (c.d) o << "d = " << *c.d << "\n";
  if (c.n) o << "n = " << *c.n << "\n";
  if (c.eta) o << "eta = " << *c.eta << "\n";
  if (c.steps) o << "steps = " << *c.steps << "\n";
  if (c.init) {
    o << "init_scale = ";
    switch (c.init->scale) {
      case InitScale::small: o << "small"; break;
      case InitScale::middle: o << "middle"; break;
      case InitScale::large: o << "large"; break;
      case InitScale::explicit_k: o << c.init->k; break;
    }
    o << "\n";
  }
  if (c.target_scale) o << "target_scale = " << *c.target_scale << "\n";
  o << "seed = " << c.seed << "\n";
  if (c.dt) o << "dt = " << *c.dt << "\n";
  if (c.t_end) o << "t_end = " << *c.t_end << "\n";
  o << "output_dir = " << c.output_dir << "\n";
  if (c.mode) o << "mode = " << (*c.mode == DescentMode::population ? "population" : "empirical") << "\n";
  if (!c.anchors.empty()) {
    o << "anchors = ";
    for (std::size_t i = 0; i < c.anchors.size(); ++i) o << (i ? ", " : "") << c.anchors[i];
    o << "\n";
  }
  if (c.depth) o << "depth = " << *c.depth << "\n";
  if (c.width) o << "width = " << *c.width << "\n";
  if (c.record_every) o << "record_every = " << *c.record_every << "\n";
  if (c.eps) o << "eps = " << *c.eps << "\n";
  if (c.configs) o << "configs = " << *c.configs << "\n";
  o << "paper_scale = " << (c.paper_scale ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace srn
