#include "srn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "srn/deep_network.hpp"
#include "srn/errors.hpp"
#include "srn/montecarlo.hpp"
#include "srn/rng.hpp"

namespace srn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFigureSlack = 0.02;
constexpr double kFlowSlack = 1e-5;
constexpr double kGdSlack = 1e-4;

// Learning rate and target scale of the full-size reference runs for 1, 2, 3 layers.
constexpr double kRefEta[] = {3e-4, 8e-6, 2e-6};
constexpr double kRefTarget[] = {1.0, 0.5, 0.3};
constexpr int kRefDim = 100;
constexpr long long kFullSamples = 10000;
constexpr long long kFullSteps = 100000;
constexpr int kDeskDim = 20;
constexpr long long kDeskSamples = 2000;
constexpr long long kDeskSteps = 20000;

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

double init_k_for(const InitSpec& init, double target_k) {
  switch (init.scale) {
    case InitScale::small: return 0.1 * target_k;
    case InitScale::middle: return target_k;
    case InitScale::large: return 2.0 * target_k;
    case InitScale::explicit_k: return init.k;
  }
  return target_k;
}

struct Problem {
  NeuronConfig config;
  WeightState init;
};

Problem make_problem(const ResolvedRun& r) {
  RandomStream rng(r.seed, 0x7a96e7);
  const Vec target = std::sqrt(r.target_k) * rng.normal_vector(r.d);
  return {NeuronConfig::balanced(target, r.m), gaussian_init(r.d, r.m, r.init_k, r.seed)};
}

long long default_record_every(long long steps) { return std::max(1LL, steps / 2000); }

std::vector<BoundRow> rows_from(const EnvelopeReport& rep, const char* kind) {
  std::vector<BoundRow> rows;
  rows.reserve(rep.samples.size());
  for (const auto& s : rep.samples) rows.push_back({s.time, kind, s.lower, s.upper});
  return rows;
}

const char* kind_name(BoundKind k) { return k == BoundKind::magnitude ? "magnitude" : "angle"; }

// Non-decreasing angle with a per-sample tolerance; returns the worst drop.
double worst_angle_drop(const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    worst = std::max(worst, traj.states[i - 1].angle - traj.states[i].angle);
  }
  return worst;
}

// Counts samples where sign(dv) disagrees with sign(v*(1 - eps)^{1/(m+1)} - v).
// Ties within tie_tol of the threshold count as consistent.
std::size_t trigger_mismatches(int m, double vs, const Trajectory& traj, double tie_tol) {
  std::size_t bad = 0;
  for (const auto& s : traj.states) {
    if (s.angle >= kPi) continue;
    const double thr = vs * std::pow(1.0 - angle_gap(s.angle), 1.0 / (m + 1));
    const double diff = thr - s.magnitude;
    if (std::abs(diff) <= tie_tol) continue;
    const double dv = polar_rhs(m, vs, s).dv;
    if ((dv > 0.0) != (diff > 0.0)) ++bad;
  }
  return bad;
}

void add_bracket_flags(ExperimentResult& out, const Trajectory& traj, const BoundEnvelope& env,
                       const std::string& tag) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < env.anchor_time) continue;
    lo = std::min(lo, traj.states[i].magnitude);
    hi = std::max(hi, traj.states[i].magnitude);
  }
  if (lo < *env.r) out.flags.push_back(tag + "bracket_violation: min ||w|| " + fmt(lo) + " < r " + fmt(*env.r));
  if (hi > *env.R) out.flags.push_back(tag + "bracket_violation: max ||w|| " + fmt(hi) + " > R " + fmt(*env.R));
}

// Membership check of a descent run against one envelope; downgraded to
// advisory when eta is beyond 0.1 x threshold.
void check_descent_envelope(ExperimentResult& out, const Trajectory& traj, const BoundEnvelope& env,
                            double eta, bool figure_slack, const std::string& name) {
  bool advisory = false;
  if (!(env.kind == BoundKind::magnitude && env.m >= 2)) {
    if (rate_regime(env, eta) == RateRegime::beyond) {
      advisory = true;
      out.warnings.push_back(name + ": eta " + fmt(eta) + " above 0.1 x threshold " +
                             fmt(gd_threshold(env)) + "; check is advisory");
    }
  }
  const EnvelopeEvaluator eval = descent_envelope(env, eta);
  EnvelopeReport rep = check_envelope_with(traj, env, 0.0, eval);
  const double slack = figure_slack ? kFigureSlack * envelope_range(rep) : kGdSlack;
  Check c{name, rep.worst_margin >= -slack, rep.worst_margin + slack};
  (advisory ? out.advisory : out.checks).push_back(c);
  out.bounds.push_back({"", rows_from(rep, kind_name(env.kind))});
}

ExperimentResult run_flow(const ResolvedRun& r) {
  ExperimentResult out;
  out.time_unit = "time";
  const Problem p = make_problem(r);
  const double vs = p.config.target_norm();
  const auto sample_every = std::max(1, static_cast<int>(std::lround(0.1 / r.dt)));
  out.trajectory = integrate_vector(p.config, p.init, r.t_end, r.dt, sample_every);
  const PolarState init = out.trajectory.states.front();

  FlowSpec spec{r.m, vs, init, r.t_end, r.dt};
  const Trajectory polar = integrate_polar(spec, sample_every);
  double sup = 0.0;
  for (std::size_t i = 0; i < std::min(polar.size(), out.trajectory.size()); ++i) {
    sup = std::max({sup, std::abs(polar.states[i].magnitude - out.trajectory.states[i].magnitude),
                    std::abs(polar.states[i].angle - out.trajectory.states[i].angle)});
  }
  out.checks.push_back({"polar_reduction", sup <= 1e-6, 1e-6 - sup});

  const Interval range = magnitude_range_from_bounds(r.m, vs, init);
  const auto ang = BoundEnvelope::angle(r.m, vs, init, range.lower, range.upper);
  const auto mag = BoundEnvelope::magnitude(r.m, vs, init);
  for (const auto* env : {&ang, &mag}) {
    const EnvelopeReport rep = check_envelope(out.trajectory, *env, kFlowSlack);
    out.checks.push_back({std::string(kind_name(env->kind)) + "_envelope", rep.pass,
                          rep.worst_margin + kFlowSlack});
    out.bounds.push_back({"", rows_from(rep, kind_name(env->kind))});
  }

  const double drop = worst_angle_drop(out.trajectory);
  out.checks.push_back({"angle_monotone", drop <= 1e-12, 1e-12 - drop});
  const std::size_t bad = trigger_mismatches(r.m, vs, out.trajectory, 1e-12 * vs);
  out.checks.push_back({"magnitude_trigger", bad == 0, -static_cast<double>(bad)});
  if (r.m >= 1) {
    const double drift = balance_drift(out.trajectory);
    out.checks.push_back({"balance_conserved", drift <= 1e-8, 1e-8 - drift});
  }
  return out;
}

ExperimentResult run_gd_experiment(const ResolvedRun& r) {
  ExperimentResult out;
  out.time_unit = "step";
  const Problem p = make_problem(r);
  const double vs = p.config.target_norm();
  const DescentConfig dc{r.eta, r.steps, r.mode, static_cast<std::size_t>(r.n), r.seed, r.record_every};
  out.trajectory = run_gd(p.config, p.init, dc);
  const PolarState init = out.trajectory.states.front();

  // Flow range widened by 1% for discretization.
  const Interval range = magnitude_range_from_bounds(r.m, vs, init);
  const auto ang = BoundEnvelope::angle(r.m, vs, init, 0.99 * range.lower, 1.01 * range.upper);
  const auto mag = BoundEnvelope::magnitude(r.m, vs, init);
  check_descent_envelope(out, out.trajectory, ang, r.eta, false, "angle_envelope");
  check_descent_envelope(out, out.trajectory, mag, r.eta, false, "magnitude_envelope");
  add_bracket_flags(out, out.trajectory, ang, "");

  const double per_step = 10.0 * r.eta * static_cast<double>(r.record_every);
  const double drop = worst_angle_drop(out.trajectory);
  out.checks.push_back({"angle_monotone", drop <= per_step, per_step - drop});
  if (r.m >= 1) {
    const double drift = balance_drift(out.trajectory);
    out.checks.push_back({"balance_drift", drift < 100.0 * r.eta, 100.0 * r.eta - drift});
  }
  return out;
}

ExperimentResult run_figure(const ResolvedRun& r, BoundKind kind) {
  ExperimentResult out;
  out.time_unit = "step";
  const Problem p = make_problem(r);
  const double vs = p.config.target_norm();
  const DescentConfig dc{r.eta, r.steps, r.mode, static_cast<std::size_t>(r.n), r.seed, r.record_every};
  out.trajectory = run_gd(p.config, p.init, dc);
  const PolarState init = out.trajectory.states.front();

  if (kind == BoundKind::angle) {
    const Interval br = bracket_recipe(r.init.scale, init.magnitude, vs);
    const auto env = BoundEnvelope::angle(r.m, vs, init, br.lower, br.upper);
    check_descent_envelope(out, out.trajectory, env, r.eta, true, "angle_envelope");
    add_bracket_flags(out, out.trajectory, env, "");
  } else {
    const auto env = BoundEnvelope::magnitude(r.m, vs, init);
    check_descent_envelope(out, out.trajectory, env, r.eta, true, "magnitude_envelope");
  }
  return out;
}

double mean_width_after(const std::vector<BoundRow>& rows, double from) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (row.x < from) continue;
    sum += row.upper - row.lower;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

ExperimentResult run_reanchor(const ResolvedRun& r) {
  ExperimentResult out;
  out.time_unit = "step";
  const Problem p = make_problem(r);
  const double vs = p.config.target_norm();
  const DescentConfig dc{r.eta, r.steps, r.mode, static_cast<std::size_t>(r.n), r.seed, r.record_every};
  out.trajectory = run_gd(p.config, p.init, dc);
  if (r.anchors.back() > r.steps) throw ConfigError("reanchor: anchor beyond the run length");

  // All anchors share one panel per kind; slack is 2% of the panel's range.
  struct Entry {
    long long anchor;
    BoundEnvelope env;
    EnvelopeReport rep;
  };
  std::vector<Entry> entries;
  const BoundEnvelope base_mag = BoundEnvelope::magnitude(r.m, vs, out.trajectory.states.front());
  for (long long a : r.anchors) {
    const BoundEnvelope mag = reanchor(base_mag, out.trajectory, static_cast<double>(a));
    const PolarState at{mag.v0, mag.phi0};
    const Interval br = bracket_recipe(r.init.scale, at.magnitude, vs);
    const auto ang = BoundEnvelope::angle(r.m, vs, at, br.lower, br.upper, mag.anchor_time);
    for (const auto& env : {ang, mag}) {
      if (rate_regime(env, r.eta) == RateRegime::beyond && !(env.kind == BoundKind::magnitude && env.m >= 2)) {
        out.warnings.push_back("anchor " + std::to_string(a) + ": eta above 0.1 x threshold");
      }
      entries.push_back({a, env, check_envelope_with(out.trajectory, env, 0.0, descent_envelope(env, r.eta))});
    }
    add_bracket_flags(out, out.trajectory, ang, "anchor_" + std::to_string(a) + "_");
  }

  double panel[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& e : entries) {
      if (static_cast<int>(e.env.kind) != k) continue;
      for (const auto& s : e.rep.samples) {
        lo = std::min(lo, s.lower);
        hi = std::max(hi, s.upper);
      }
    }
    panel[k] = hi - lo;
  }

  const double last = static_cast<double>(r.anchors.back());
  std::vector<double> widths[2];
  for (const auto& e : entries) {
    const int k = static_cast<int>(e.env.kind);
    const std::string name = "anchor_" + std::to_string(e.anchor) + "_" + kind_name(e.env.kind) + "_envelope";
    const bool downgraded = rate_regime(e.env, r.eta) == RateRegime::beyond &&
                            !(e.env.kind == BoundKind::magnitude && e.env.m >= 2);
    const double slack = kFigureSlack * panel[k];
    (downgraded ? out.advisory : out.checks)
        .push_back({name, e.rep.worst_margin >= -slack, e.rep.worst_margin + slack});
    const double own = kFigureSlack * envelope_range(e.rep);
    out.advisory.push_back({name + "_own_range", e.rep.worst_margin >= -own, e.rep.worst_margin + own});

    const std::string file = e.anchor == r.anchors.front() ? "bounds.csv"
                                                           : "bounds_anchor_" + std::to_string(e.anchor) + ".csv";
    auto it = std::find_if(out.bounds.begin(), out.bounds.end(), [&](const BoundsFile& b) { return b.filename == file; });
    if (it == out.bounds.end()) {
      out.bounds.push_back({file, {}});
      it = out.bounds.end() - 1;
    }
    const auto rows = rows_from(e.rep, kind_name(e.env.kind));
    it->rows.insert(it->rows.end(), rows.begin(), rows.end());
    widths[k].push_back(mean_width_after(rows, last));
  }
  if (r.anchors.size() > 1) {
    // The first anchor is also kept under its own name.
    const auto& first = out.bounds.front();
    out.bounds.push_back({"bounds_anchor_" + std::to_string(r.anchors.front()) + ".csv", first.rows});
  }

  const char* names[2] = {"magnitude_tightening", "angle_tightening"};
  for (int k = 0; k < 2; ++k) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < widths[k].size(); ++i) {
      worst = std::min(worst, widths[k][i - 1] - widths[k][i] + 1e-12 * std::abs(widths[k][i - 1]));
    }
    if (widths[k].size() > 1) out.checks.push_back({names[k], worst >= 0.0, worst});
  }
  Table t{"anchor_widths.csv", {"anchor", "angle_mean_width", "magnitude_mean_width"}, {}};
  for (std::size_t i = 0; i < r.anchors.size(); ++i) {
    t.rows.push_back({static_cast<double>(r.anchors[i]), widths[1][i], widths[0][i]});
  }
  out.tables.push_back(std::move(t));
  return out;
}

// Pass rule shared by every Monte Carlo comparison: no entry beyond 4 sigma and
// at most 1% of entries beyond 3 sigma.
struct ZSummary {
  double max_abs = 0.0;
  std::size_t beyond3 = 0;
  std::size_t entries = 0;
};

void accumulate(ZSummary& s, const Mat& z) {
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j && i < z.rows(); ++i) {
      const double a = std::abs(z(i, j));
      s.max_abs = std::max(s.max_abs, a);
      s.beyond3 += a > 3.0;
      ++s.entries;
    }
  }
}

ExperimentResult run_lemma_verify(const ResolvedRun& r) {
  ExperimentResult out;
  const auto n = static_cast<std::size_t>(r.n);
  RandomStream rng(r.seed, 0x1e33a);
  ZSummary all;
  Table t{"lemma_checks.csv", {"config", "moment", "theta", "max_abs_z"}, {}};
  for (int c = 0; c < r.configs; ++c) {
    Vec u = rng.normal_vector(r.d);
    u.normalize();
    Vec v;
    double theta = 0.0;
    do {
      v = rng.normal_vector(r.d);
      v.normalize();
      theta = std::acos(std::clamp(u.dot(v), -1.0, 1.0));
    } while (std::sin(theta) < 0.05);
    const std::uint64_t s = mix_seed(r.seed + 1000 * static_cast<std::uint64_t>(c));
    const double inv_d = 1.0 / r.d;
    const Mat z[5] = {
        z_scores(mc_half_space_moment(u, n, s + 1), half_space_second_moment(u)),
        z_scores(mc_double_wedge_moment(u, v, n, s + 2), double_wedge_second_moment(u, v)),
        z_scores(mc_relu_product(u, v, n, s + 3), Mat::Constant(1, 1, relu_product_moment(theta))),
        z_scores(mc_half_space_moment(u, n, s + 4, Sampling::sphere), inv_d * half_space_second_moment(u)),
        z_scores(mc_double_wedge_moment(u, v, n, s + 5, Sampling::sphere),
                 inv_d * double_wedge_second_moment(u, v)),
    };
    const char* names[5] = {"half_space", "double_wedge", "relu_product", "sphere_half_space",
                            "sphere_double_wedge"};
    for (int k = 0; k < 5; ++k) {
      ZSummary one;
      accumulate(one, z[k]);
      accumulate(all, z[k]);
      out.checks.push_back({"cfg" + std::to_string(c) + "_" + names[k], one.max_abs <= 4.0, 4.0 - one.max_abs});
      t.rows.push_back({static_cast<double>(c), static_cast<double>(k), theta, one.max_abs});
    }
  }
  const double share = static_cast<double>(all.beyond3) / static_cast<double>(all.entries);
  out.checks.push_back({"share_beyond_3sigma", share <= 0.01, 0.01 - share});
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentResult run_error_scaling(const ResolvedRun&) {
  ExperimentResult out;
  const std::vector<double> etas = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
  const double v0 = 0.5;
  ExpFlowForm logistic;
  logistic.c = 1.0;
  logistic.g = [=](double x) { return 1.0 / std::sqrt(1.0 - (1.0 - 1.0 / (v0 * v0)) * x); };
  const auto rows = gd_error_scaling(logistic, [](double w) { return -0.5 * w * (w * w - 1.0); }, etas, 10.0);
  const double slope = loglog_slope(rows);
  out.checks.push_back({"logistic_slope", slope >= 0.8 && slope <= 1.2, 0.2 - std::abs(slope - 1.0)});

  ExpFlowForm linear;
  linear.c = 1.0;
  linear.g = [](double x) { return x; };
  const auto lin = gd_error_scaling(linear, [](double w) { return -w; }, etas, 10.0);
  double worst = 0.0;
  for (const auto& row : lin) worst = std::max(worst, row.max_error);
  out.checks.push_back({"linear_exact", worst < 1e-12, 1e-12 - worst});

  Table t{"error_scaling.csv", {"eta", "steps", "logistic_max_error", "linear_max_error"}, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.rows.push_back({rows[i].eta, static_cast<double>(rows[i].steps), rows[i].max_error, lin[i].max_error});
  }
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentResult run_stopping_time(const ResolvedRun& r) {
  ExperimentResult out;
  out.time_unit = "step";
  const Problem p = make_problem(r);
  const double vs = p.config.target_norm();
  const PolarState init = polar_of(p.config, p.init);
  const Interval range = magnitude_range_from_bounds(r.m, vs, init);
  const auto env = BoundEnvelope::angle(r.m, vs, init, 0.99 * range.lower, 1.01 * range.upper);
  const long long T = stopping_time(env, r.eta, r.eps, &out.warnings);
  const DescentConfig dc{r.eta, std::max(T, 1LL), DescentMode::population, 1, r.seed,
                         default_record_every(std::max(T, 1LL))};
  out.trajectory = run_gd(p.config, p.init, dc);
  double phi_T = out.trajectory.states.front().angle;
  for (std::size_t i = 0; i < out.trajectory.size(); ++i) {
    if (out.trajectory.times[i] <= static_cast<double>(T)) phi_T = out.trajectory.states[i].angle;
  }
  const double margin = phi_T - (kPi - r.eps);
  out.checks.push_back({"angle_within_eps_at_T", margin > 0.0, margin});
  out.tables.push_back({"stopping_time.csv", {"eta", "eps", "T", "phi_T"},
                        {{r.eta, r.eps, static_cast<double>(T), phi_T}}});
  return out;
}

ExperimentResult run_deep_general(const ResolvedRun& r) {
  ExperimentResult out;
  out.time_unit = "step";
  const DeepShape shape{r.d, r.depth, r.width};
  const DeepNetwork teacher = DeepNetwork::gaussian(shape, r.target_k, mix_seed(r.seed) ^ 0x7ea);
  const DeepNetwork student = DeepNetwork::gaussian(shape, r.init_k, r.seed);
  const DeepRun run = train_deep(student, teacher, static_cast<std::size_t>(r.n), r.eta, r.steps,
                                 r.record_every, r.seed);
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    out.trajectory.times.push_back(static_cast<double>(run.steps[i]));
    out.trajectory.states.push_back({run.norms[i], std::numeric_limits<double>::quiet_NaN()});
    out.trajectory.losses.push_back(run.losses[i]);
  }
  const bool grows = run.norms.back() > run.norms.front();
  const Trend expected = r.init_k < r.target_k ? Trend::increasing : Trend::decreasing;
  const double viol = trend_violation(run, expected, 0.01);
  const std::string dir = expected == Trend::increasing ? "increasing" : "decreasing";
  out.checks.push_back({"norm_" + dir + "_after_burn_in", viol == 0.0, -viol});
  out.checks.push_back({"net_norm_change_" + dir, grows == (expected == Trend::increasing),
                        std::abs(run.norms.back() - run.norms.front())});
  return out;
}

}  // namespace

bool ExperimentResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Interval bracket_recipe(InitScale scale, double init_norm, double target_norm) {
  switch (scale) {
    case InitScale::small: return {init_norm, target_norm};
    case InitScale::middle: return {0.5 * target_norm, std::max(init_norm, target_norm)};
    case InitScale::large: return {0.5 * target_norm, init_norm};
    case InitScale::explicit_k: break;
  }
  throw ConfigError("bracket recipe needs init_scale small, middle or large");
}

EnvelopeEvaluator descent_envelope(const BoundEnvelope& env, double eta, Warnings* warnings) {
  if (env.kind == BoundKind::magnitude && env.m >= 2) {
    BoundEnvelope scaled = env;
    scaled.anchor_time = env.anchor_time * eta;
    return [scaled, eta](double step) { return flow_bounds(scaled, step * eta); };
  }
  if (warnings && rate_regime(env, eta) == RateRegime::beyond) {
    warnings->push_back("eta above 0.1 x threshold");
  }
  return [env, eta](double step) { return gd_bounds(env, eta, std::llround(step)); };
}

double envelope_range(const EnvelopeReport& rep) {
  if (rep.samples.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : rep.samples) {
    lo = std::min(lo, s.lower);
    hi = std::max(hi, s.upper);
  }
  return hi - lo;
}

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun r;
  r.experiment = cfg.experiment;
  r.seed = cfg.seed;
  r.m = cfg.m.value_or(0);
  const bool paper = cfg.paper_scale;
  const int dim = paper ? kRefDim : kDeskDim;
  // Desk runs keep E||w*||^2 and eta * T of the full-size reference runs.
  const double step_ratio = paper ? 1.0 : static_cast<double>(kFullSteps) / kDeskSteps;

  switch (cfg.experiment) {
    case Experiment::figure_angle:
    case Experiment::figure_magnitude: {
      const bool has_ref = r.m <= 2;
      if (!has_ref && (!cfg.eta || !cfg.target_scale)) {
        throw ConfigError("figure runs with m > 2 need eta and target_scale");
      }
      r.d = cfg.d.value_or(dim);
      r.n = cfg.n.value_or(paper ? kFullSamples : kDeskSamples);
      r.steps = cfg.steps.value_or(paper ? kFullSteps : kDeskSteps);
      r.eta = cfg.eta.value_or(has_ref ? kRefEta[r.m] * step_ratio : 0.0);
      r.target_k = cfg.target_scale.value_or(has_ref ? kRefTarget[r.m] * kRefDim / r.d : 0.0);
      r.mode = cfg.mode.value_or(DescentMode::empirical);
      break;
    }
    case Experiment::reanchor: {
      if (r.m > 1 && (!cfg.eta || !cfg.steps)) throw ConfigError("reanchor with m > 1 needs eta and steps");
      r.d = cfg.d.value_or(dim);
      r.n = cfg.n.value_or(paper ? kFullSamples : kDeskSamples);
      r.eta = cfg.eta.value_or(r.m == 0 ? 6e-4 : 1e-4);
      r.steps = cfg.steps.value_or(r.m == 0 ? 30000 : 2000);
      r.target_k = cfg.target_scale.value_or(1.2 * kRefDim / r.d);
      r.mode = cfg.mode.value_or(DescentMode::empirical);
      if (!cfg.record_every) r.record_every = 10;
      break;
    }
    case Experiment::deep_general: {
      // Desk: full-size SN rate with 1/5 of the steps; LN at 3e-6, the largest
      // stable rate found for k = 0.44 (the full-size 1e-4 diverges).
      const bool large = cfg.init && cfg.init->scale == InitScale::large;
      r.d = cfg.d.value_or(dim);
      r.n = cfg.n.value_or(paper ? kFullSamples : 250);
      r.steps = cfg.steps.value_or(paper ? (large ? 30000 : 100000) : (large ? 6000 : 20000));
      r.eta = cfg.eta.value_or(large ? (paper ? 1e-4 : 3e-6) : 8e-4);
      r.target_k = cfg.target_scale.value_or(0.1);
      r.depth = cfg.depth.value_or(5);
      r.width = cfg.width.value_or(50);
      break;
    }
    default:
      r.d = cfg.d.value_or(r.experiment == Experiment::lemma_verify ? 5 : dim);
      r.n = cfg.n.value_or(r.experiment == Experiment::lemma_verify ? 1000000 : (paper ? kFullSamples : kDeskSamples));
      r.target_k = cfg.target_scale.value_or(1.0 / r.d);
      r.mode = cfg.mode.value_or(DescentMode::population);
      r.steps = cfg.steps.value_or(10000);
      break;
  }

  r.init = cfg.init.value_or(InitSpec{InitScale::middle, 0.0});
  if (r.experiment == Experiment::deep_general) {
    if (r.init.scale == InitScale::small) r.init_k = 0.04;
    else if (r.init.scale == InitScale::large) r.init_k = 0.44;
    else r.init_k = init_k_for(r.init, r.target_k);
  } else {
    r.init_k = init_k_for(r.init, r.target_k);
  }
  r.dt = cfg.dt.value_or(1e-3);
  r.t_end = cfg.t_end.value_or(20.0);
  r.anchors = cfg.anchors.empty() ? std::vector<long long>{0} : cfg.anchors;
  r.eps = cfg.eps.value_or(1e-2);
  r.configs = cfg.configs.value_or(4);
  if (cfg.record_every) r.record_every = *cfg.record_every;
  else if (r.experiment != Experiment::reanchor) r.record_every = default_record_every(r.steps);

  if (r.experiment == Experiment::gd || r.experiment == Experiment::stopping_time) {
    if (cfg.eta) {
      r.eta = *cfg.eta;
    } else {
      // 0.01 x the angle threshold of the problem this seed draws.
      const Problem p = make_problem(r);
      const PolarState init = polar_of(p.config, p.init);
      const Interval range = magnitude_range_from_bounds(r.m, p.config.target_norm(), init);
      const auto env = BoundEnvelope::angle(r.m, p.config.target_norm(), init, 0.99 * range.lower,
                                            1.01 * range.upper);
      r.eta = 0.01 * gd_threshold(env);
    }
  }
  if (!(r.eta > 0.0) && r.experiment != Experiment::flow && r.experiment != Experiment::lemma_verify &&
      r.experiment != Experiment::error_scaling) {
    throw ConfigError("eta could not be resolved");
  }
  return r;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.check_required();
  const auto start = std::chrono::steady_clock::now();
  const ResolvedRun r = resolve(cfg);
  ExperimentResult out;
  switch (r.experiment) {
    case Experiment::flow: out = run_flow(r); break;
    case Experiment::gd: out = run_gd_experiment(r); break;
    case Experiment::figure_angle: out = run_figure(r, BoundKind::angle); break;
    case Experiment::figure_magnitude: out = run_figure(r, BoundKind::magnitude); break;
    case Experiment::reanchor: out = run_reanchor(r); break;
    case Experiment::lemma_verify: out = run_lemma_verify(r); break;
    case Experiment::error_scaling: out = run_error_scaling(r); break;
    case Experiment::stopping_time: out = run_stopping_time(r); break;
    case Experiment::deep_general: out = run_deep_general(r); break;
  }
  out.experiment = to_string(r.experiment);
  out.seed = r.seed;
  out.config_text = render_run_config(cfg);
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace srn
