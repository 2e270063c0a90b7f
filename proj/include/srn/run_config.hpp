#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srn/descent.hpp"

namespace srn {

enum class Experiment {
  flow,
  gd,
  figure_angle,
  figure_magnitude,
  reanchor,
  lemma_verify,
  error_scaling,
  stopping_time,
  deep_general,
};

const std::vector<Experiment>& all_experiments();
std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

enum class InitScale { small, middle, large, explicit_k };

struct InitSpec {
  InitScale scale = InitScale::small;
  double k = 0.0;  // used when scale == explicit_k
};

/// Declarative description of one run. Unset optionals take experiment
/// defaults at resolve time (desk or paper scale).
struct RunConfig {
  Experiment experiment = Experiment::flow;
  std::optional<int> m;
  std::optional<int> d;
  std::optional<long long> n;
  std::optional<double> eta;
  std::optional<long long> steps;
  std::optional<InitSpec> init;
  std::optional<double> target_scale;
  std::uint64_t seed = 0;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string output_dir = "out";
  std::optional<DescentMode> mode;
  std::vector<long long> anchors;
  std::optional<int> depth;
  std::optional<int> width;
  std::optional<long long> record_every;
  std::optional<double> eps;
  std::optional<int> configs;
  bool paper_scale = false;

  /// Sets one key from its textual value. Throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  /// Throws ConfigError naming the first missing required key.
  void check_required() const;
};

/// Keys accepted in config files.
const std::vector<std::string>& config_keys();

/// Keys an experiment cannot run without.
std::vector<std::string> required_keys(Experiment e);

/// key = value lines, '#' starts a comment. `source` labels error messages.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);

/// Canonical key = value rendering (round-trips through parse_run_config).
std::string render_run_config(const RunConfig& cfg);

}  // namespace srn
