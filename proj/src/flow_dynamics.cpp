#include "srn/flow_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "srn/errors.hpp"

namespace srn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBlowUp = 1e12;
constexpr double kClampTol = 1e-12;
// Angles this close to pi are frozen at pi (converged).
constexpr double kFreezeGap = 1e-12;

bool is_frozen(double phi) { return kPi - phi <= kFreezeGap; }

// Same as polar_rhs but accepts the frozen boundary phi == pi.
PolarRate rhs_unchecked(int m, double vstar, double v, double phi) {
  const double drive = 1.0 - angle_gap(phi);
  const double vm = std::pow(v, m);
  const double vstar_m1 = std::pow(vstar, m + 1);
  PolarRate r;
  r.dv = -0.5 * vm * (v * vm - vstar_m1 * drive);
  r.dphi = is_frozen(phi) ? 0.0 : std::pow(v, m - 1) * vstar_m1 * phi * std::sin(phi) / (2.0 * kPi);
  return r;
}

void check_finite_magnitude(double v) {
  if (!std::isfinite(v) || v > kBlowUp) {
    throw BlowUpError("flow integration: magnitude blew up");
  }
  if (!(v > 0.0)) {
    throw BlowUpError("flow integration: magnitude reached zero");
  }
}

double settle_angle(double phi) {
  if (phi > kPi + kClampTol || phi < -kClampTol || !std::isfinite(phi)) {
    throw BlowUpError("flow integration: angle left [0, pi] by more than the clamp tolerance");
  }
  if (is_frozen(phi)) return kPi;
  return phi;
}

}  // namespace

void FlowSpec::validate() const {
  if (m < 0) throw DomainError("FlowSpec: m must be non-negative");
  if (!(target_norm > 0.0)) throw DomainError("FlowSpec: target norm must be positive");
  if (!(initial.magnitude > 0.0)) throw DomainError("FlowSpec: initial magnitude must be positive");
  if (!(initial.angle > 0.0 && initial.angle < kPi)) {
    throw DomainError("FlowSpec: initial angle must lie in (0, pi)");
  }
  if (!(dt > 0.0) || !(t_end > 0.0) || dt > t_end) {
    throw DomainError("FlowSpec: need 0 < dt <= t_end");
  }
}

double angle_gap(double phi) {
  const double delta = kPi - phi;
  if (delta < 1e-6) {
    // eps(pi - d) = d^2/2 - d^3/(3 pi) - d^4/24 + d^5/(30 pi) + d^6/720 + O(d^7)
    const double d2 = delta * delta;
    return d2 * (0.5 + delta * (-1.0 / (3.0 * kPi) +
                                delta * (-1.0 / 24.0 + delta * (1.0 / (30.0 * kPi) + delta / 720.0))));
  }
  // pi eps = 2 pi sin^2(d/2) - (sin d - d cos d)
  const double s = std::sin(0.5 * delta);
  return (2.0 * kPi * s * s - (std::sin(delta) - delta * std::cos(delta))) / kPi;
}

PolarRate polar_rhs(int m, double target_norm, const PolarState& state) {
  if (m < 0) throw DomainError("polar_rhs: m must be non-negative");
  if (!(state.magnitude > 0.0)) throw DomainError("polar_rhs: magnitude must be positive");
  if (!(state.angle > 0.0 && state.angle < kPi)) {
    throw DomainError("polar_rhs: angle must lie in (0, pi)");
  }
  const double phi = state.angle;
  const double v = state.magnitude;
  const double drive = 1.0 - angle_gap(phi);
  const double vm = std::pow(v, m);
  const double vstar_m1 = std::pow(target_norm, m + 1);
  return {-0.5 * vm * (v * vm - vstar_m1 * drive),
          std::pow(v, m - 1) * vstar_m1 * phi * std::sin(phi) / (2.0 * kPi)};
}

Gradient vector_rhs(const NeuronConfig& config, const WeightState& state) {
  Gradient g = population_gradient(config, state);
  g.w = -g.w;
  for (double& h : g.hidden) h = -h;
  return g;
}

Trajectory integrate_polar(const FlowSpec& spec, int sample_every) {
  spec.validate();
  if (sample_every < 1) throw DomainError("integrate_polar: sample_every must be positive");

  const auto steps = static_cast<long long>(std::ceil(spec.t_end / spec.dt - 1e-9));
  const double h = spec.t_end / static_cast<double>(steps);
  const int m = spec.m;
  const double vs = spec.target_norm;

  Trajectory traj;
  double v = spec.initial.magnitude;
  double phi = spec.initial.angle;
  traj.times.push_back(0.0);
  traj.states.push_back({v, phi});

  for (long long i = 1; i <= steps; ++i) {
    const PolarRate k1 = rhs_unchecked(m, vs, v, phi);
    const PolarRate k2 = rhs_unchecked(m, vs, v + 0.5 * h * k1.dv, settle_angle(phi + 0.5 * h * k1.dphi));
    const PolarRate k3 = rhs_unchecked(m, vs, v + 0.5 * h * k2.dv, settle_angle(phi + 0.5 * h * k2.dphi));
    const PolarRate k4 = rhs_unchecked(m, vs, v + h * k3.dv, settle_angle(phi + h * k3.dphi));
    v += h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    phi = settle_angle(phi + h / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi));
    check_finite_magnitude(v);
    if (i % sample_every == 0 || i == steps) {
      traj.times.push_back(static_cast<double>(i) * h);
      traj.states.push_back({v, phi});
    }
  }
  return traj;
}

namespace {

WeightState axpy(const WeightState& s, double a, const Gradient& g) {
  WeightState out;
  out.w = s.w + a * g.w;
  out.hidden.resize(s.hidden.size());
  for (std::size_t k = 0; k < s.hidden.size(); ++k) out.hidden[k] = s.hidden[k] + a * g.hidden[k];
  return out;
}

}  // namespace

Trajectory integrate_vector(const NeuronConfig& config, const WeightState& init, double t_end,
                            double dt, int sample_every) {
  config.validate();
  check_consistent(config, init);
  if (!(dt > 0.0) || !(t_end > 0.0) || dt > t_end) {
    throw DomainError("integrate_vector: need 0 < dt <= t_end");
  }
  if (sample_every < 1) throw DomainError("integrate_vector: sample_every must be positive");

  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);

  Trajectory traj;
  auto record = [&](double t, const WeightState& s) {
    traj.times.push_back(t);
    traj.states.push_back(polar_of(config, s));
    traj.losses.push_back(population_loss(config, s));
    traj.hidden.push_back(s.hidden);
  };

  WeightState s = init;
  record(0.0, s);
  for (long long i = 1; i <= steps; ++i) {
    const Gradient k1 = vector_rhs(config, s);
    const Gradient k2 = vector_rhs(config, axpy(s, 0.5 * h, k1));
    const Gradient k3 = vector_rhs(config, axpy(s, 0.5 * h, k2));
    const Gradient k4 = vector_rhs(config, axpy(s, h, k3));
    s.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    for (std::size_t k = 0; k < s.hidden.size(); ++k) {
      s.hidden[k] += h / 6.0 * (k1.hidden[k] + 2.0 * k2.hidden[k] + 2.0 * k3.hidden[k] + k4.hidden[k]);
    }
    const double nw = s.w.norm();
    check_finite_magnitude(nw);
    if (i % sample_every == 0 || i == steps) record(static_cast<double>(i) * h, s);
  }
  return traj;
}

}  // namespace srn
