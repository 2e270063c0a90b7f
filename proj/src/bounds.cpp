#include "srn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "srn/errors.hpp"

namespace srn {

namespace {

constexpr double kPi = std::numbers::pi;

double cot_half(double phi0) { return 1.0 / std::tan(0.5 * phi0); }

// pi - 2 cot(phi0/2) x + (2/3) cot^3(phi0/2) x3, clipped to pi.
double angle_upper_from(double phi0, double x, double x3) {
  const double c = cot_half(phi0);
  return std::min(kPi, kPi - 2.0 * c * x + (2.0 / 3.0) * c * c * c * x3);
}

double angle_lower_from(double phi0, double x) { return kPi - 2.0 * cot_half(phi0) * x; }

double elapsed_since_anchor(const BoundEnvelope& env, double t) {
  const double e = t - env.anchor_time;
  if (e < -1e-12) throw DomainError("bound evaluated before its anchor time");
  return std::max(0.0, e);
}

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

double two_layer_closed_form(double vstar, double v0, double eps, double t) {
  const double a = (1.0 - eps) * vstar * vstar;
  return std::sqrt(a / (1.0 - (1.0 - a / (v0 * v0)) * std::exp(-a * t)));
}

double frozen_rhs(int m, double a, double v) {
  const double vm = std::pow(v, m);
  return -0.5 * vm * (v * vm - a);
}

double rk4_step(int m, double a, double v, double h) {
  const double k1 = frozen_rhs(m, a, v);
  const double k2 = frozen_rhs(m, a, v + 0.5 * h * k1);
  const double k3 = frozen_rhs(m, a, v + 0.5 * h * k2);
  const double k4 = frozen_rhs(m, a, v + h * k3);
  return v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Adaptive RK4 (step doubling) starting from step dt. The solution moves
// monotonically toward v_fix, so the stiffness cap is taken at max(v, v_fix).
double frozen_ode(int m, double vstar, double v0, double eps, double elapsed, double dt) {
  const double a = (1.0 - eps) * std::pow(vstar, m + 1);
  const double v_fix = std::pow(a, 1.0 / (m + 1));
  constexpr double kTol = 1e-14;

  double v = v0;
  double t = 0.0;
  double h = dt;
  while (elapsed - t > 1e-15 * elapsed) {
    if (std::abs(v - v_fix) <= 1e-15 * v_fix) return v;
    const double stiffness = 0.5 * (2 * m + 1) * std::pow(std::max(v, v_fix), 2 * m);
    h = std::min({h, 0.2 / stiffness, elapsed - t});
    const double full = rk4_step(m, a, v, h);
    const double half = rk4_step(m, a, rk4_step(m, a, v, 0.5 * h), 0.5 * h);
    const double err = std::abs(full - half) / 15.0;
    const double scale = kTol * std::max(1.0, std::abs(v));
    if (err > scale && h > 1e-12 * dt) {
      h *= std::max(0.2, 0.9 * std::pow(scale / err, 0.2));
      continue;
    }
    t += h;
    v = half + (half - full) / 15.0;
    const double grow = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return v;
}

double frozen_hypergeometric(int m, double vstar, double v0, double eps, double elapsed,
                             double z_cap) {
  const double a = (1.0 - eps) * std::pow(vstar, m + 1);
  if (std::pow(v0, m + 1) / a >= z_cap) {
    throw UnavailableError("2F1 path: initial argument is at or beyond the series cap");
  }
  if (elapsed == 0.0) return v0;

  const double c0 = implicit_magnitude_potential(m, vstar, eps, v0);
  const double target = c0 - 0.5 * elapsed;
  const auto g = [&](double v) { return implicit_magnitude_potential(m, vstar, eps, v) - target; };

  const double hi = std::pow(z_cap * a, 1.0 / (m + 1));
  if (g(hi) > 0.0) {
    throw UnavailableError("2F1 path: root lies beyond the series cap");
  }
  return find_root_bracketed(g, v0, hi, BisectOptions{.x_tol = 1e-15 * hi, .f_tol = 0.0});
}

}  // namespace

void BoundEnvelope::validate() const {
  require(m >= 0, "BoundEnvelope: m must be non-negative");
  require(target_norm > 0.0, "BoundEnvelope: target norm must be positive");
  require(phi0 > 0.0 && phi0 <= kPi, "BoundEnvelope: phi0 must lie in (0, pi]");
  require(v0 >= 0.0, "BoundEnvelope: v0 must be non-negative");
  if (kind == BoundKind::magnitude && m >= 1) require(v0 > 0.0, "BoundEnvelope: v0 must be positive for m >= 1");
  require(anchor_time >= 0.0, "BoundEnvelope: negative anchor time");
  if (r && R) require(*r < *R, "BoundEnvelope: need r < R");
  if (r) require(*r > 0.0, "BoundEnvelope: r must be positive");
  if (kind == BoundKind::angle) {
    require(r.has_value() && R.has_value(), "BoundEnvelope: angle envelopes need r and R");
  }
}

BoundEnvelope BoundEnvelope::magnitude(int m, double target_norm, PolarState at, double anchor_time) {
  BoundEnvelope env;
  env.kind = BoundKind::magnitude;
  env.m = m;
  env.target_norm = target_norm;
  env.phi0 = at.angle;
  env.v0 = at.magnitude;
  env.anchor_time = anchor_time;
  env.validate();
  return env;
}

BoundEnvelope BoundEnvelope::angle(int m, double target_norm, PolarState at, double r, double R,
                                   double anchor_time) {
  BoundEnvelope env;
  env.kind = BoundKind::angle;
  env.m = m;
  env.target_norm = target_norm;
  env.phi0 = at.angle;
  env.v0 = at.magnitude;
  env.r = r;
  env.R = R;
  env.anchor_time = anchor_time;
  env.validate();
  return env;
}

Interval magnitude_bounds_one_layer(const BoundEnvelope& env, double t) {
  require(env.kind == BoundKind::magnitude && env.m == 0,
          "magnitude_bounds_one_layer: needs a one-layer magnitude envelope");
  const double e = std::exp(-0.5 * elapsed_since_anchor(env, t));
  const double vs = env.target_norm;
  return {(1.0 - env.eps0()) * (1.0 - e) * vs + env.v0 * e, (1.0 - e) * vs + env.v0 * e};
}

Interval angle_bounds_one_layer(const BoundEnvelope& env, double t) {
  require(env.kind == BoundKind::angle && env.m == 0,
          "angle_bounds_one_layer: needs a one-layer angle envelope");
  env.validate();
  const double s = elapsed_since_anchor(env, t);
  const double rate_lo = env.target_norm / (2.0 * *env.R) * env.phi0 / kPi;
  const double rate_up = env.target_norm / (2.0 * *env.r);
  return {angle_lower_from(env.phi0, std::exp(-rate_lo * s)),
          angle_upper_from(env.phi0, std::exp(-rate_up * s), std::exp(-3.0 * rate_up * s))};
}

double implicit_magnitude_potential(int m, double target_norm, double eps, double v) {
  require(m >= 2, "implicit_magnitude_potential: needs m >= 2");
  const double a = (1.0 - eps) * std::pow(target_norm, m + 1);
  const double z = std::pow(v, m + 1) / a;
  const Hyp2F1Params p{1.0, (1.0 - m) / (m + 1.0), 2.0 / (m + 1.0)};
  return std::pow(v, 1 - m) / ((m - 1) * a) * hyp2f1(p, z);
}

double frozen_eps_magnitude(int m, double target_norm, double v0, double eps, double elapsed,
                            const MagnitudeBoundOptions& opts) {
  require(m >= 1, "frozen_eps_magnitude: needs m >= 1");
  require(v0 > 0.0 && target_norm > 0.0, "frozen_eps_magnitude: magnitudes must be positive");
  require(eps >= 0.0 && eps < 1.0, "frozen_eps_magnitude: eps must lie in [0, 1)");
  require(elapsed >= 0.0, "frozen_eps_magnitude: negative time");

  if (opts.path == MagnitudePath::ode) {
    return frozen_ode(m, target_norm, v0, eps, elapsed, opts.ode_dt);
  }
  if (m == 1) return two_layer_closed_form(target_norm, v0, eps, elapsed);
  if (opts.path == MagnitudePath::hypergeometric) {
    return frozen_hypergeometric(m, target_norm, v0, eps, elapsed, opts.z_cap);
  }
  try {
    return frozen_hypergeometric(m, target_norm, v0, eps, elapsed, opts.z_cap);
  } catch (const UnavailableError&) {
  } catch (const ConvergenceError&) {
  }
  return frozen_ode(m, target_norm, v0, eps, elapsed, opts.ode_dt);
}

Interval magnitude_bounds_multilayer(const BoundEnvelope& env, double t,
                                     const MagnitudeBoundOptions& opts) {
  require(env.kind == BoundKind::magnitude && env.m >= 1,
          "magnitude_bounds_multilayer: needs a multi-layer magnitude envelope");
  const double s = elapsed_since_anchor(env, t);
  return {frozen_eps_magnitude(env.m, env.target_norm, env.v0, env.eps0(), s, opts),
          frozen_eps_magnitude(env.m, env.target_norm, env.v0, 0.0, s, opts)};
}

Interval angle_bounds_multilayer(const BoundEnvelope& env, double t) {
  require(env.kind == BoundKind::angle && env.m >= 1,
          "angle_bounds_multilayer: needs a multi-layer angle envelope");
  env.validate();
  const double s = elapsed_since_anchor(env, t);
  const double vs_pow = std::pow(env.target_norm, env.m + 1);
  const double rate_lo = env.phi0 / (2.0 * kPi) * std::pow(*env.r, env.m - 1) * vs_pow;
  const double rate_up = 0.5 * std::pow(*env.R, env.m - 1) * vs_pow;
  return {angle_lower_from(env.phi0, std::exp(-rate_lo * s)),
          angle_upper_from(env.phi0, std::exp(-rate_up * s), std::exp(-3.0 * rate_up * s))};
}

Interval flow_bounds(const BoundEnvelope& env, double t, const MagnitudeBoundOptions& opts) {
  if (env.kind == BoundKind::magnitude) {
    return env.m == 0 ? magnitude_bounds_one_layer(env, t) : magnitude_bounds_multilayer(env, t, opts);
  }
  return env.m == 0 ? angle_bounds_one_layer(env, t) : angle_bounds_multilayer(env, t);
}

EnvelopeReport check_envelope_with(const Trajectory& traj, const BoundEnvelope& env, double slack,
                                   const EnvelopeEvaluator& evaluate) {
  EnvelopeReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (t < env.anchor_time - 1e-12) continue;
    const double obs = env.kind == BoundKind::magnitude ? traj.states[i].magnitude : traj.states[i].angle;
    const Interval b = evaluate(t);
    SampleCheck sc{t, obs, b.lower, b.upper, true};
    const double margin = std::min(obs - b.lower, b.upper - obs);
    sc.inside = margin >= -slack;
    rep.pass = rep.pass && sc.inside;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    rep.max_width = std::max(rep.max_width, b.upper - b.lower);
    ++rep.checked;
    rep.samples.push_back(sc);
  }
  if (rep.checked == 0) rep.worst_margin = 0.0;
  return rep;
}

EnvelopeReport check_envelope(const Trajectory& traj, const BoundEnvelope& env, double slack,
                              const MagnitudeBoundOptions& opts) {
  return check_envelope_with(traj, env, slack, [&](double t) { return flow_bounds(env, t, opts); });
}

BoundEnvelope reanchor(const BoundEnvelope& env, const Trajectory& traj, double anchor_time) {
  if (traj.empty()) throw DomainError("reanchor: empty trajectory");
  std::size_t best = 0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (std::abs(traj.times[i] - anchor_time) < std::abs(traj.times[best] - anchor_time)) best = i;
  }
  BoundEnvelope out = env;
  out.phi0 = traj.states[best].angle;
  out.v0 = traj.states[best].magnitude;
  out.anchor_time = traj.times[best];
  out.validate();
  return out;
}

Interval magnitude_range_from_bounds(int m, double target_norm, PolarState initial) {
  const double eps0 = angle_gap(initial.angle);
  const double lower_limit = target_norm * std::pow(1.0 - eps0, 1.0 / (m + 1));
  return {std::min(initial.magnitude, lower_limit), std::max(initial.magnitude, target_norm)};
}

double convergence_horizon(int m, double target_norm, PolarState initial, double angle_tol,
                           double magnitude_tol) {
  require(angle_tol > 0.0 && magnitude_tol > 0.0, "convergence_horizon: tolerances must be positive");
  const Interval range = magnitude_range_from_bounds(m, target_norm, initial);
  const BoundEnvelope ang = BoundEnvelope::angle(m, target_norm, initial, range.lower * (1.0 - 1e-9),
                                                 range.upper * (1.0 + 1e-9));
  const BoundEnvelope mag = BoundEnvelope::magnitude(m, target_norm, initial);

  // Stage 1: the angle lower bound passes pi - gap, which caps eps(phi) <= gap^2 / 2.
  const double gap = std::min(angle_tol, std::sqrt(magnitude_tol / target_norm));
  const double cot0 = cot_half(initial.angle);
  double t1 = 0.0;
  if (2.0 * cot0 > gap) {
    const double rate = m == 0 ? target_norm / (2.0 * *ang.R) * initial.angle / kPi
                               : initial.angle / (2.0 * kPi) * std::pow(*ang.r, m - 1) *
                                     std::pow(target_norm, m + 1);
    t1 = std::log(2.0 * cot0 / gap) / rate;
  }
  const Interval at_t1 = flow_bounds(mag, t1);
  const double eps1 = angle_gap(kPi - gap);

  // Stage 2: re-anchored magnitude envelopes from the extremes of [lower, upper] at t1.
  auto converged = [&](double s) {
    double lo = 0.0;
    double hi = 0.0;
    if (m == 0) {
      const double e = std::exp(-0.5 * s);
      lo = (1.0 - eps1) * (1.0 - e) * target_norm + at_t1.lower * e;
      hi = (1.0 - e) * target_norm + at_t1.upper * e;
    } else {
      lo = frozen_eps_magnitude(m, target_norm, at_t1.lower, eps1, s);
      hi = frozen_eps_magnitude(m, target_norm, at_t1.upper, 0.0, s);
    }
    return std::abs(lo - target_norm) < magnitude_tol && std::abs(hi - target_norm) < magnitude_tol;
  };
  double s_hi = 1.0;
  while (!converged(s_hi)) {
    s_hi *= 2.0;
    if (s_hi > 1e9) throw ConvergenceError("convergence_horizon: magnitude never settles");
  }
  double s_lo = 0.0;
  for (int i = 0; i < 60 && s_hi - s_lo > 1e-6 * s_hi; ++i) {
    const double mid = 0.5 * (s_lo + s_hi);
    (converged(mid) ? s_hi : s_lo) = mid;
  }
  return t1 + s_hi;
}

}  // namespace srn
