#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srn/bounds.hpp"
#include "srn/descent.hpp"
#include "srn/run_config.hpp"

namespace srn {

struct Check {
  std::string name;
  bool pass = true;
  double margin = 0.0;
};

struct BoundRow {
  double x = 0.0;
  std::string kind;
  double lower = 0.0;
  double upper = 0.0;
};

struct BoundsFile {
  std::string filename;
  std::vector<BoundRow> rows;
};

/// Free-form numeric table written as CSV next to the standard artifacts.
struct Table {
  std::string filename;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  std::string experiment;
  std::uint64_t seed = 0;
  /// "step" for descent runs, "time" for flow runs.
  std::string time_unit = "time";
  Trajectory trajectory;
  std::vector<BoundsFile> bounds;
  std::vector<Table> tables;
  /// Checks that decide the exit status.
  std::vector<Check> checks;
  /// Checks downgraded to warnings (learning rate outside the stated regime).
  std::vector<Check> advisory;
  /// Non-failing observations, e.g. the trajectory leaving the assumed [r, R] bracket.
  std::vector<std::string> flags;
  std::vector<std::string> warnings;
  std::string config_text;
  double runtime_seconds = 0.0;

  bool ok() const;
};

/// Fully resolved numeric parameters of a run (defaults applied).
struct ResolvedRun {
  Experiment experiment = Experiment::flow;
  int m = 0;
  int d = 20;
  long long n = 2000;
  double eta = 1e-3;
  long long steps = 1000;
  InitSpec init;
  double init_k = 0.0;
  double target_k = 0.05;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  double t_end = 20.0;
  DescentMode mode = DescentMode::population;
  std::vector<long long> anchors;
  int depth = 5;
  int width = 50;
  long long record_every = 1;
  double eps = 1e-2;
  int configs = 4;
};

/// Applies desk-scale (or paper-scale) defaults to unset fields.
ResolvedRun resolve(const RunConfig& cfg);

ExperimentResult run_experiment(const RunConfig& cfg);

/// (r, R) recipe for small / middle / large initializations.
Interval bracket_recipe(InitScale scale, double init_norm, double target_norm);

/// Envelope of a descent run: the descent bound where a closed form exists,
/// otherwise the flow bound at time eta * step.
EnvelopeEvaluator descent_envelope(const BoundEnvelope& env, double eta, Warnings* warnings = nullptr);

/// Widest span max(upper) - min(lower) over the checked samples.
double envelope_range(const EnvelopeReport& rep);

}  // namespace srn
