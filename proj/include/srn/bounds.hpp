#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srn/flow_dynamics.hpp"
#include "srn/special_fns.hpp"

namespace srn {

enum class BoundKind { magnitude, angle };

/// Constants that define an analytic lower/upper envelope for the magnitude
/// or the angle of a trajectory.
///
/// `anchor_time` is where (v0, phi0) were read; evaluators take absolute
/// time (or step) and use the elapsed amount since the anchor. eps0 is always
/// recomputed from phi0.
struct BoundEnvelope {
  BoundKind kind = BoundKind::magnitude;
  int m = 0;
  double target_norm = 1.0;
  double phi0 = 0.0;
  double v0 = 0.0;
  std::optional<double> r;
  std::optional<double> R;
  double anchor_time = 0.0;

  double eps0() const { return angle_gap(phi0); }
  void validate() const;

  static BoundEnvelope magnitude(int m, double target_norm, PolarState at, double anchor_time = 0.0);
  static BoundEnvelope angle(int m, double target_norm, PolarState at, double r, double R,
                             double anchor_time = 0.0);
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

enum class MagnitudePath { automatic, hypergeometric, ode };

struct MagnitudeBoundOptions {
  MagnitudePath path = MagnitudePath::automatic;
  /// Largest 2F1 argument the series path accepts; beyond it the ODE path is used.
  double z_cap = 0.999;
  /// Initial step of the adaptive RK4 frozen-eps ODE path.
  double ode_dt = 1e-3;
};

Interval magnitude_bounds_one_layer(const BoundEnvelope& env, double t);
Interval angle_bounds_one_layer(const BoundEnvelope& env, double t);
Interval magnitude_bounds_multilayer(const BoundEnvelope& env, double t,
                                     const MagnitudeBoundOptions& opts = {});
Interval angle_bounds_multilayer(const BoundEnvelope& env, double t);

/// Dispatch on kind and m.
Interval flow_bounds(const BoundEnvelope& env, double t, const MagnitudeBoundOptions& opts = {});

/// Solution u(elapsed; eps) of the frozen-eps magnitude equation
///   du/dt = -1/2 u^m (u^{m+1} - v*^{m+1} (1 - eps)),  u(0) = v0,  m >= 1.
/// m = 1 uses the explicit solution; m >= 2 inverts the 2F1 relation or
/// integrates the ODE depending on `opts.path`. Throws UnavailableError when
/// the requested path cannot evaluate the point.
double frozen_eps_magnitude(int m, double target_norm, double v0, double eps, double elapsed,
                            const MagnitudeBoundOptions& opts = {});

/// Left-hand side of the implicit 2F1 relation,
///   F(v) = v^{1-m} / ((m-1) a) 2F1(1, (1-m)/(m+1); 2/(m+1); v^{m+1}/a),  a = v*^{m+1}(1-eps),
/// which satisfies dF/dv = 1 / (v^m (v^{m+1} - a)). m >= 2 and v^{m+1} < a.
double implicit_magnitude_potential(int m, double target_norm, double eps, double v);

struct SampleCheck {
  double time = 0.0;
  double observed = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool inside = true;
};

struct EnvelopeReport {
  bool pass = true;
  /// min over checked samples of min(observed - lower, upper - observed); negative means outside.
  double worst_margin = 0.0;
  /// max over checked samples of upper - lower.
  double max_width = 0.0;
  std::size_t checked = 0;
  std::vector<SampleCheck> samples;
};

using EnvelopeEvaluator = std::function<Interval(double)>;

/// Checks lower - slack <= observed <= upper + slack for every sample at or after the anchor.
EnvelopeReport check_envelope_with(const Trajectory& traj, const BoundEnvelope& env, double slack,
                                   const EnvelopeEvaluator& evaluate);

/// check_envelope_with against the gradient-flow bounds.
EnvelopeReport check_envelope(const Trajectory& traj, const BoundEnvelope& env, double slack,
                              const MagnitudeBoundOptions& opts = {});

/// Envelope constants re-read from the trajectory sample closest to `anchor_time`.
BoundEnvelope reanchor(const BoundEnvelope& env, const Trajectory& traj, double anchor_time);

/// Magnitude range [r, R] guaranteed by the flow magnitude bounds for all t >= 0,
/// from the monotone envelopes: between v0 and their limits.
Interval magnitude_range_from_bounds(int m, double target_norm, PolarState initial);

/// Flow time after which the angle lower bound exceeds pi - angle_tol and both
/// re-anchored magnitude bounds lie within magnitude_tol of v*.
double convergence_horizon(int m, double target_norm, PolarState initial, double angle_tol,
                           double magnitude_tol);

}  // namespace srn
