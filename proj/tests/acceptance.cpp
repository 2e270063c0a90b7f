// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "srn/bounds.hpp"
#include "srn/descent.hpp"
#include "srn/errors.hpp"
#include "srn/experiments.hpp"
#include "srn/flow_dynamics.hpp"
#include "srn/montecarlo.hpp"
#include "srn/population.hpp"
#include "srn/rng.hpp"

using namespace srn;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec random_unit(RandomStream& rng, int d) {
  Vec u = rng.normal_vector(d);
  return u / u.norm();
}

double uniform(RandomStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// z-score rule shared with the Monte Carlo checks: no |z| > 4 and at most 1% beyond 3.
struct ZTally {
  double worst = 0.0;
  std::size_t beyond3 = 0;
  std::size_t total = 0;

  void add(const Mat& z) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double a = std::abs(z.data()[i]);
      worst = std::max(worst, a);
      beyond3 += a > 3.0;
      ++total;
    }
  }
  bool ok() const { return worst <= 4.0 && static_cast<double>(beyond3) <= 0.01 * static_cast<double>(total); }
};

Outcome criterion1() {
  const auto t0 = Clock::now();
  RandomStream rng(101);
  ZTally tally;
  for (int c = 0; c < 20; ++c) {
    const int d = 2 + c % 9;
    const Vec u = random_unit(rng, d);
    Vec v = random_unit(rng, d);
    while (std::sin(std::acos(std::clamp(u.dot(v), -1.0, 1.0))) < 0.05) v = random_unit(rng, d);
    const std::uint64_t seed = 1000 + c;
    tally.add(z_scores(mc_half_space_moment(u, 1000000, seed), half_space_second_moment(u)));
    tally.add(z_scores(mc_double_wedge_moment(u, v, 1000000, seed + 1), double_wedge_second_moment(u, v)));
    const double theta = std::acos(std::clamp(u.dot(v), -1.0, 1.0));
    tally.add(z_scores(mc_relu_product(u, v, 1000000, seed + 2), Mat::Constant(1, 1, relu_product_moment(theta))));
  }
  const double secs = seconds_since(t0);
  return {tally.ok() && secs < 60.0, "max|z| " + fmt("%.2f", tally.worst) + ", beyond 3 sigma " +
                                         std::to_string(tally.beyond3) + "/" + std::to_string(tally.total) +
                                         ", " + fmt("%.1f s", secs)};
}

Outcome criterion2() {
  RandomStream rng(202);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int m = i % 4;
    const int d = 2 + static_cast<int>(rng.uniform() * 9);
    const NeuronConfig cfg = NeuronConfig::balanced(uniform(rng, 0.5, 1.5) * random_unit(rng, d), m);
    WeightState s;
    s.w = uniform(rng, 0.3, 1.5) * random_unit(rng, d);
    for (int k = 0; k < m; ++k) s.hidden.push_back(uniform(rng, 0.5, 1.5));
    const Gradient g = population_gradient(cfg, s);
    double scale = g.w.cwiseAbs().maxCoeff();
    for (double x : g.hidden) scale = std::max(scale, std::abs(x));
    auto loss_at = [&](int idx, double delta) {
      WeightState t = s;
      if (idx < d) t.w[idx] += delta;
      else t.hidden[static_cast<std::size_t>(idx - d)] += delta;
      return population_loss(cfg, t);
    };
    for (int idx = 0; idx < d + m; ++idx) {
      const double fd = (loss_at(idx, h) - loss_at(idx, -h)) / (2 * h);
      const double an = idx < d ? g.w[idx] : g.hidden[static_cast<std::size_t>(idx - d)];
      worst = std::max(worst, std::abs(fd - an) / std::max(scale, 1e-3));
    }
  }
  return {worst <= 1e-5, "worst relative error " + fmt("%.2e", worst)};
}

struct FlowCase {
  int m = 0;
  NeuronConfig cfg;
  WeightState init;
  PolarState polar0;
};

std::vector<FlowCase> flow_cases() {
  RandomStream rng(303);
  std::vector<FlowCase> out;
  for (int m = 0; m <= 3; ++m) {
    for (int i = 0; i < 20; ++i) {
      const int d = 2 + static_cast<int>(rng.uniform() * 9);
      FlowCase c;
      c.m = m;
      c.cfg = NeuronConfig::balanced(uniform(rng, 0.6, 1.4) * random_unit(rng, d), m);
      // phi0 -> 0 is the saddle where convergence time diverges; keep phi0 >= 0.3
      do {
        c.init = WeightState::balanced(uniform(rng, 0.2, 1.4) * random_unit(rng, d), m);
        c.polar0 = polar_of(c.cfg, c.init);
      } while (c.polar0.angle < 0.3);
      out.push_back(std::move(c));
    }
  }
  return out;
}

Outcome criterion3(const std::vector<FlowCase>& cases) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& c : cases) {
    const Trajectory vec = integrate_vector(c.cfg, c.init, 20.0, 1e-3, 100);
    const Trajectory pol = integrate_polar(FlowSpec{c.m, c.cfg.target_norm(), c.polar0, 20.0, 1e-3}, 100);
    if (vec.size() != pol.size()) return {false, "sample grids differ"};
    for (std::size_t i = 0; i < vec.size(); ++i) {
      worst = std::max({worst, std::abs(vec.states[i].magnitude - pol.states[i].magnitude),
                        std::abs(vec.states[i].angle - pol.states[i].angle)});
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 120.0, "sup-norm gap " + fmt("%.2e", worst) + ", " + fmt("%.1f s", secs)};
}

Outcome criterion4(const std::vector<FlowCase>& cases) {
  // Integrate in 10-unit segments (every RK4 step recorded) until both
  // tolerances hold, then compare the hitting time with the predicted horizon.
  double worst_drop = 0.0, worst_ratio = 0.0;
  std::size_t missed = 0;
  for (const auto& c : cases) {
    const double vs = c.cfg.target_norm();
    const double T = convergence_horizon(c.m, vs, c.polar0, 1e-3, 1e-3);
    PolarState s = c.polar0;
    double t = 0.0;
    bool hit = false;
    while (!hit && t < T) {
      const double len = std::min(10.0, T - t);
      const Trajectory seg = integrate_polar(FlowSpec{c.m, vs, s, len, 1e-3}, 1);
      for (std::size_t i = 1; i < seg.size() && !hit; ++i) {
        worst_drop = std::max(worst_drop, seg.states[i - 1].angle - seg.states[i].angle);
        if (seg.states[i].angle > kPi - 1e-3 && std::abs(seg.states[i].magnitude - vs) < 1e-3) {
          hit = true;
          worst_ratio = std::max(worst_ratio, (t + seg.times[i]) / T);
        }
      }
      s = seg.states.back();
      t += len;
    }
    missed += !hit;
  }
  const bool ok = worst_drop <= 1e-12 && missed == 0;
  return {ok, "largest angle drop " + fmt("%.1e", worst_drop) + ", " + std::to_string(missed) +
                  " missed, latest hit at " + fmt("%.3f", worst_ratio) + " x horizon"};
}

Outcome criterion5(const std::vector<FlowCase>& cases) {
  const double slack = 1e-5;
  double worst = 1e300, path_gap = 0.0;
  std::size_t failures = 0, path_points = 0;
  const MagnitudeBoundOptions ode{MagnitudePath::ode};
  const MagnitudeBoundOptions hyp{MagnitudePath::hypergeometric};
  for (const auto& c : cases) {
    const double vs = c.cfg.target_norm();
    const Trajectory t = integrate_polar(FlowSpec{c.m, vs, c.polar0, 20.0, 1e-3}, 500);
    const Interval range = magnitude_range_from_bounds(c.m, vs, c.polar0);
    const auto ang = BoundEnvelope::angle(c.m, vs, c.polar0, range.lower, range.upper);
    const auto mag = BoundEnvelope::magnitude(c.m, vs, c.polar0);
    std::vector<EnvelopeReport> reps = {check_envelope(t, ang, slack), check_envelope(t, mag, slack)};
    if (c.m >= 2) {
      reps.push_back(check_envelope(t, mag, slack, ode));
      for (double time : t.times) {
        for (double eps : {0.0, mag.eps0()}) {
          try {
            const double a = frozen_eps_magnitude(c.m, vs, c.polar0.magnitude, eps, time, hyp);
            const double b = frozen_eps_magnitude(c.m, vs, c.polar0.magnitude, eps, time, ode);
            path_gap = std::max(path_gap, std::abs(a - b));
            ++path_points;
          } catch (const UnavailableError&) {
          }
        }
      }
    }
    for (const auto& r : reps) {
      worst = std::min(worst, r.worst_margin);
      failures += !r.pass;
    }
  }
  const bool ok = failures == 0 && path_gap <= 1e-6 && path_points > 0;
  return {ok, "worst margin " + fmt("%.2e", worst) + ", path gap " + fmt("%.1e", path_gap) + " over " +
                  std::to_string(path_points) + " points"};
}

Outcome criterion6(const std::vector<FlowCase>& cases) {
  std::size_t checked = 0, mismatched = 0, ties = 0;
  for (const auto& c : cases) {
    const double vs = c.cfg.target_norm();
    const Trajectory t = integrate_polar(FlowSpec{c.m, vs, c.polar0, 20.0, 1e-3}, 10);
    for (const auto& s : t.states) {
      const double gap = vs * std::pow(1.0 - angle_gap(s.angle), 1.0 / (c.m + 1)) - s.magnitude;
      if (std::abs(gap) <= 1e-12 * vs) {
        ++ties;
        continue;
      }
      const double dv = polar_rhs(c.m, vs, s).dv;
      ++checked;
      mismatched += (dv > 0) != (gap > 0) || dv == 0.0;
    }
  }
  return {mismatched == 0, std::to_string(checked) + " states, " + std::to_string(mismatched) + " mismatched, " +
                               std::to_string(ties) + " ties"};
}

Outcome criterion7() {
  const int d = 20;
  double slowest = 0.0;
  std::string failed;
  std::size_t runs = 0;
  for (int m : {0, 1}) {
    for (double k : {0.1, 1.0, 2.0}) {
      const auto t0 = Clock::now();
      RandomStream rng(700 + m);
      const NeuronConfig cfg = NeuronConfig::balanced(rng.normal_vector(d) / std::sqrt(d), m);
      const WeightState init = gaussian_init(d, m, k / d, 710 + m);
      const PolarState p0 = polar_of(cfg, init);
      const Interval range = magnitude_range_from_bounds(m, cfg.target_norm(), p0);
      const auto ang = BoundEnvelope::angle(m, cfg.target_norm(), p0, 0.99 * range.lower, 1.01 * range.upper);
      const auto mag = BoundEnvelope::magnitude(m, cfg.target_norm(), p0);
      DescentConfig dc;
      dc.eta = 0.01 * std::min(gd_threshold(ang), gd_threshold(mag));
      dc.steps = 10000;
      dc.record_every = 10;
      const Trajectory t = run_gd(cfg, init, dc);
      for (const auto& env : {ang, mag}) {
        const EnvelopeReport r = check_gd_envelope(t, env, dc.eta, 1e-4);
        if (!r.pass) {
          failed += (failed.empty() ? "" : "; ") + std::string(env.kind == BoundKind::angle ? "angle" : "magnitude") +
                    " m=" + std::to_string(m) + " k=" + fmt("%.1f", k) + "/d outside by " + fmt("%.1e", -r.worst_margin) + " (slack 1e-4)";
        }
      }
      slowest = std::max(slowest, seconds_since(t0));
      ++runs;
    }
  }
  const std::string timing = std::to_string(runs) + " runs, slowest " + fmt("%.2f s", slowest);
  if (!failed.empty()) return {false, timing + "; " + failed};
  return {slowest < 60.0, timing};
}

Outcome criterion8() {
  const double v0 = 0.5;
  ExpFlowForm logistic{1.0, [=](double x) { return std::sqrt(1.0 / (1.0 - (1.0 - 1.0 / (v0 * v0)) * x)); }, nullptr};
  const std::vector<double> etas = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
  const double slope = loglog_slope(gd_error_scaling(logistic, [](double w) { return -0.5 * w * (w * w - 1.0); }, etas, 10.0));
  ExpFlowForm linear{1.0, [](double x) { return 2.0 * x; }, nullptr};
  double lin = 0.0;
  for (const auto& r : gd_error_scaling(linear, [](double w) { return -w; }, etas, 10.0)) lin = std::max(lin, r.max_error);
  return {slope >= 0.8 && slope <= 1.2 && lin < 1e-12, "slope " + fmt("%.3f", slope) + ", linear error " + fmt("%.1e", lin)};
}

Outcome criterion9() {
  RandomStream rng(909);
  std::size_t failures = 0;
  double worst = 1e300;
  for (int i = 0; i < 10; ++i) {
    const int m = i % 3;
    const int d = 5;
    const double vs = uniform(rng, 0.5, 1.5);
    const double phi0 = uniform(rng, 0.3, 2.8);
    const double eps = std::pow(10.0, uniform(rng, -3.0, -1.0));
    const NeuronConfig cfg = NeuronConfig::balanced(vs * random_unit(rng, d), m);
    // place w at angle phi0 from the target
    const Vec u = cfg.target_w / vs;
    Vec perp = random_unit(rng, d);
    perp = (perp - perp.dot(u) * u).normalized();
    const double theta = kPi - phi0;
    const WeightState init =
        WeightState::balanced(uniform(rng, 0.3, 1.5) * vs * (std::cos(theta) * u + std::sin(theta) * perp), m);
    const PolarState p0 = polar_of(cfg, init);
    const Interval range = magnitude_range_from_bounds(m, vs, p0);
    const auto env = BoundEnvelope::angle(m, vs, p0, 0.99 * range.lower, 1.01 * range.upper);
    const double eta = std::pow(10.0, uniform(rng, -3.0, -2.0)) * gd_threshold(env);
    const long long T = stopping_time(env, eta, eps);
    double phi_T = p0.angle;
    if (T > 0) {
      DescentConfig dc;
      dc.eta = eta;
      dc.steps = T;
      dc.record_every = T;
      phi_T = run_gd(cfg, init, dc).states.back().angle;
    }
    const double margin = phi_T - (kPi - eps);
    worst = std::min(worst, margin);
    failures += !(margin > 0.0);
  }
  return {failures == 0, "worst phi(T) - (pi - eps) " + fmt("%.2e", worst)};
}

Outcome criterion10() {
  const ConcentrationResult r = angle_concentration(100, 0.5, 10000, 1010);
  return {r.consistent(), "fraction " + fmt("%.6f", r.fraction) + " vs bound " + fmt("%.6f", r.bound) +
                              " - 3 x " + fmt("%.1e", r.stderr_)};
}

Outcome criterion11() {
  RandomStream rng(1111);
  double flow = 0.0, gd_ratio = 0.0;
  for (int m = 1; m <= 3; ++m) {
    for (int i = 0; i < 3; ++i) {
      const int d = 4;
      const NeuronConfig cfg = NeuronConfig::balanced(uniform(rng, 0.6, 1.2) * random_unit(rng, d), m);
      WeightState s;
      s.w = uniform(rng, 0.3, 1.0) * random_unit(rng, d);
      for (int k = 0; k < m; ++k) s.hidden.push_back(uniform(rng, 0.4, 1.0));
      flow = std::max(flow, balance_drift(integrate_vector(cfg, s, 10.0, 1e-3, 10)));

      DescentConfig dc;
      dc.eta = 1e-3;
      dc.steps = 10000;
      dc.record_every = 10;
      gd_ratio = std::max(gd_ratio, balance_drift(run_gd(cfg, WeightState::balanced(s.w, m), dc)) / (100 * dc.eta));
    }
  }
  return {flow <= 1e-8 && gd_ratio < 1.0, "flow drift " + fmt("%.1e", flow) + ", GD drift / 100 eta " + fmt("%.3f", gd_ratio)};
}

Outcome criterion12() {
  std::vector<std::pair<std::string, std::string>> runs;
  for (const char* kind : {"figure-angle", "figure-magnitude"}) {
    for (int m = 0; m <= 2; ++m) {
      for (const char* scale : {"small", "middle", "large"}) {
        runs.push_back({std::string(kind) + " m=" + std::to_string(m) + " " + scale,
                        std::string("experiment = ") + kind + "\nm = " + std::to_string(m) + "\ninit_scale = " + scale + "\n"});
      }
    }
  }
  runs.push_back({"reanchor m=0", "experiment = reanchor\nm = 0\nanchors = 0, 2500, 5000, 7500\n"});
  runs.push_back({"reanchor m=1", "experiment = reanchor\nm = 1\nanchors = 0, 120, 250, 500\n"});
  runs.push_back({"deep small", "experiment = deep-general\ninit_scale = small\n"});
  runs.push_back({"deep large", "experiment = deep-general\ninit_scale = large\n"});

  std::string failed;
  std::size_t checks = 0;
  const auto t0 = Clock::now();
  for (const auto& [label, text] : runs) {
    RunConfig cfg = parse_run_config(text + "seed = 1\n", label);
    const ExperimentResult r = run_experiment(cfg);
    checks += r.checks.size();
    if (!r.ok() || r.checks.empty()) failed += (failed.empty() ? "" : ", ") + label;
  }
  if (!failed.empty()) return {false, "failing runs: " + failed};
  return {true, std::to_string(runs.size()) + " runs, " + std::to_string(checks) + " checks, " +
                    fmt("%.0f s", seconds_since(t0))};
}

}  // namespace

int main() {
  const std::vector<FlowCase> cases = flow_cases();
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1},
      {2, criterion2},
      {3, [&] { return criterion3(cases); }},
      {4, [&] { return criterion4(cases); }},
      {5, [&] { return criterion5(cases); }},
      {6, [&] { return criterion6(cases); }},
      {7, criterion7},
      {8, criterion8},
      {9, criterion9},
      {10, criterion10},
      {11, criterion11},
      {12, criterion12},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
