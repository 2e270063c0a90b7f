#include "srn/descent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "srn/errors.hpp"
#include "srn/rng.hpp"

namespace srn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDivergence = 1e12;

void warn(Warnings* sink, const std::string& msg) {
  if (sink) sink->push_back(msg);
}

double cot_half(double phi0) { return 1.0 / std::tan(0.5 * phi0); }

double power_steps(double base, double T) {
  if (base <= 0.0) throw DomainError("descent bound: 1 - c eta must be positive");
  return std::pow(base, T);
}

struct AngleRates {
  double lower = 0.0;
  double upper = 0.0;
};

AngleRates angle_rates(const BoundEnvelope& env) {
  const double vs = env.target_norm;
  if (env.m == 0) return {vs * env.phi0 / (2.0 * kPi * *env.R), vs / (2.0 * *env.r)};
  const double vs_pow = std::pow(vs, env.m + 1);
  return {env.phi0 / (2.0 * kPi) * std::pow(*env.r, env.m - 1) * vs_pow,
          0.5 * std::pow(*env.R, env.m - 1) * vs_pow};
}

double elapsed_steps(const BoundEnvelope& env, long long T) {
  const double e = static_cast<double>(T) - env.anchor_time;
  if (e < -1e-9) throw DomainError("gd_bounds: step before the anchor");
  return std::max(0.0, e);
}

}  // namespace

void DescentConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("DescentConfig: eta must be positive");
  if (steps < 1) throw DomainError("DescentConfig: steps must be positive");
  if (record_every < 1) throw DomainError("DescentConfig: record_every must be positive");
  if (mode == DescentMode::empirical && n_samples < 1) {
    throw DomainError("DescentConfig: empirical mode needs n_samples >= 1");
  }
}

Dataset make_dataset(const NeuronConfig& config, std::size_t n, std::uint64_t seed) {
  config.validate();
  const int d = config.dim();
  Dataset data{kernels::RowMatrix(static_cast<Eigen::Index>(n), d), Vec(static_cast<Eigen::Index>(n))};
  RandomStream rng(seed, 0xda7a);
  const double p_star = config.target_product();
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (int j = 0; j < d; ++j) data.x(i, j) = rng.normal();
    data.y[i] = p_star * std::max(0.0, data.x.row(i).dot(config.target_w));
  }
  return data;
}

WeightState gaussian_init(int d, int m, double k, std::uint64_t seed) {
  if (d < 1 || m < 0 || !(k > 0.0)) throw DomainError("gaussian_init: need d >= 1, m >= 0, k > 0");
  RandomStream rng(seed, 0x1417);
  return WeightState::balanced(std::sqrt(k) * rng.normal_vector(d), m);
}

WeightState gd_step(const NeuronConfig& config, const WeightState& state, double eta,
                    const Dataset* batch) {
  WeightState next = state;
  if (batch == nullptr) {
    const Gradient g = population_gradient(config, state);
    next.w -= eta * g.w;
    for (std::size_t k = 0; k < next.hidden.size(); ++k) next.hidden[k] -= eta * g.hidden[k];
  } else {
    check_consistent(config, state);
    const double p = state.hidden_product();
    const auto g = kernels::empirical_gradient_parallel(batch->x, batch->y, state.w, p);
    next.w -= eta * g.grad_w;
    for (std::size_t k = 0; k < next.hidden.size(); ++k) {
      next.hidden[k] -= eta * g.residual_dot * p / state.hidden[k];
    }
  }
  for (std::size_t k = 0; k < next.hidden.size(); ++k) {
    if (!(next.hidden[k] > 0.0)) {
      std::ostringstream msg;
      msg << "gd_step: hidden scalar v_" << k + 1 << " left (0, inf): " << next.hidden[k];
      throw DomainError(msg.str());
    }
  }
  return next;
}

namespace {

Trajectory run_gd_impl(const NeuronConfig& config, const WeightState& init, const DescentConfig& dc,
                       const Dataset* data) {
  dc.validate();
  config.validate();
  check_consistent(config, init);

  Trajectory traj;
  auto record = [&](long long step, const WeightState& s) {
    traj.times.push_back(static_cast<double>(step));
    traj.states.push_back(polar_of(config, s));
    if (data) {
      traj.losses.push_back(
          kernels::empirical_gradient_parallel(data->x, data->y, s.w, s.hidden_product()).loss);
    } else {
      traj.losses.push_back(population_loss(config, s));
    }
    traj.hidden.push_back(s.hidden);
  };

  WeightState s = init;
  record(0, s);
  for (long long i = 1; i <= dc.steps; ++i) {
    s = gd_step(config, s, dc.eta, data);
    const double nw = s.w.norm();
    if (!std::isfinite(nw) || nw > kDivergence) {
      std::ostringstream msg;
      msg << "run_gd: diverged at step " << i << " (||w|| = " << nw << ")";
      throw BlowUpError(msg.str());
    }
    if (i % dc.record_every == 0 || i == dc.steps) record(i, s);
  }
  return traj;
}

}  // namespace

Trajectory run_gd(const NeuronConfig& config, const WeightState& init, const DescentConfig& dc) {
  if (dc.mode == DescentMode::population) return run_gd_impl(config, init, dc, nullptr);
  const Dataset data = make_dataset(config, dc.n_samples, dc.seed);
  return run_gd_impl(config, init, dc, &data);
}

Trajectory run_gd(const NeuronConfig& config, const WeightState& init, const DescentConfig& dc,
                  const Dataset& data) {
  if (data.x.cols() != config.dim() || data.x.rows() != data.y.size()) {
    throw DimensionError("run_gd: dataset shape does not match the config");
  }
  return run_gd_impl(config, init, dc, &data);
}

double balance_drift(const Trajectory& traj) {
  if (traj.hidden.size() != traj.size()) throw DomainError("balance_drift: trajectory has no hidden channel");
  if (traj.empty()) return 0.0;
  auto gaps = [&](std::size_t i) {
    std::vector<double> out;
    double prev = traj.states[i].magnitude;
    for (double v : traj.hidden[i]) {
      out.push_back(v * v - prev * prev);
      prev = v;
    }
    return out;
  };
  const std::vector<double> g0 = gaps(0);
  double worst = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const std::vector<double> gi = gaps(i);
    for (std::size_t k = 0; k < gi.size(); ++k) worst = std::max(worst, std::abs(gi[k] - g0[k]));
  }
  return worst;
}

bool ExpFlowForm::is_injective(int points) const {
  if (!g || points < 2) return false;
  double prev = g(0.0);
  int sign = 0;
  for (int i = 1; i < points; ++i) {
    const double cur = g(static_cast<double>(i) / (points - 1));
    const int s = cur > prev ? 1 : (cur < prev ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) return false;
    sign = s;
    prev = cur;
  }
  return true;
}

double gf_to_gd(const ExpFlowForm& form, double eta, long long T, Warnings* warnings) {
  if (!(form.c > 0.0) || !form.g) throw DomainError("gf_to_gd: need c > 0 and a g");
  if (!(eta > 0.0)) throw DomainError("gf_to_gd: eta must be positive");
  if (T < 0) throw DomainError("gf_to_gd: negative step count");
  const double ce = form.c * eta;
  if (1.0 - ce <= 0.0) throw DomainError("gf_to_gd: 1 - c eta <= 0");
  if (ce > 0.1) throw DomainError("gf_to_gd: eta exceeds 0.1 / c");
  if (ce > 0.01) warn(warnings, "gf_to_gd: eta above 0.01 / c");
  return form.g(std::pow(1.0 - ce, static_cast<double>(T)));
}

std::vector<ErrorScalingRow> gd_error_scaling(const ExpFlowForm& form,
                                              const std::function<double(double)>& flow_rhs,
                                              const std::vector<double>& etas, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("gd_error_scaling: horizon must be positive");
  std::vector<ErrorScalingRow> rows;
  for (double eta : etas) {
    const double base = 1.0 - form.c * eta;
    if (!(eta > 0.0) || base <= 0.0) throw DomainError("gd_error_scaling: bad eta");
    const auto steps = std::llround(horizon / eta);
    double w = form.g(1.0);
    double x = 1.0;
    double worst = 0.0;
    for (long long t = 1; t <= steps; ++t) {
      w += eta * flow_rhs(w);
      x *= base;
      if (!std::isfinite(w)) throw BlowUpError("gd_error_scaling: iterate diverged");
      worst = std::max(worst, std::abs(w - form.g(x)));
    }
    rows.push_back({eta, steps, worst});
  }
  return rows;
}

double loglog_slope(const std::vector<ErrorScalingRow>& rows) {
  if (rows.size() < 2) throw DomainError("loglog_slope: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    if (!(r.max_error > 0.0)) throw DomainError("loglog_slope: non-positive error");
    const double x = std::log(r.eta);
    const double y = std::log(r.max_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double gd_threshold(const BoundEnvelope& env) {
  env.validate();
  if (env.kind == BoundKind::magnitude) {
    if (env.m == 0) return 2.0;
    if (env.m == 1) return 1.0 / (env.target_norm * env.target_norm);
    throw UnavailableError("gd_threshold: no descent magnitude bound for m >= 2");
  }
  const AngleRates c = angle_rates(env);
  return std::min(1.0 / c.lower, 1.0 / (3.0 * c.upper));
}

RateRegime rate_regime(const BoundEnvelope& env, double eta) {
  const double thr = gd_threshold(env);
  if (eta <= 0.01 * thr) return RateRegime::clean;
  if (eta <= 0.1 * thr) return RateRegime::acceptable;
  return RateRegime::beyond;
}

Interval gd_bounds(const BoundEnvelope& env, double eta, long long T, Warnings* warnings) {
  env.validate();
  if (!(eta > 0.0)) throw DomainError("gd_bounds: eta must be positive");
  if (env.kind == BoundKind::magnitude && env.m >= 2) {
    throw UnavailableError("gd_bounds: no closed-form descent magnitude bound for m >= 2");
  }
  if (rate_regime(env, eta) == RateRegime::beyond) {
    warn(warnings, "gd_bounds: eta above 0.1 x threshold; bound checks are advisory");
  }
  const double s = elapsed_steps(env, T);
  const double vs = env.target_norm;

  if (env.kind == BoundKind::magnitude) {
    if (env.m == 0) {
      const double x = power_steps(1.0 - 0.5 * eta, s);
      return {(1.0 - env.eps0()) * (1.0 - x) * vs + env.v0 * x, (1.0 - x) * vs + env.v0 * x};
    }
    auto two_layer = [&](double eps) {
      const double a = (1.0 - eps) * vs * vs;
      const double x = power_steps(1.0 - a * eta, s);
      return std::sqrt(a / (1.0 - (1.0 - a / (env.v0 * env.v0)) * x));
    };
    return {two_layer(env.eps0()), two_layer(0.0)};
  }

  const AngleRates c = angle_rates(env);
  const double ct = cot_half(env.phi0);
  const double lower = kPi - 2.0 * ct * power_steps(1.0 - c.lower * eta, s);
  const double upper = kPi - 2.0 * ct * power_steps(1.0 - c.upper * eta, s) +
                       (2.0 / 3.0) * ct * ct * ct * power_steps(1.0 - 3.0 * c.upper * eta, s);
  return {lower, std::min(kPi, upper)};
}

ExpFlowForm flow_form(const BoundEnvelope& env, EnvelopeSide side) {
  env.validate();
  const bool lo = side == EnvelopeSide::lower;
  const double vs = env.target_norm;
  const double v0 = env.v0;
  ExpFlowForm form;

  if (env.kind == BoundKind::magnitude) {
    if (env.m == 0) {
      const double scale = lo ? 1.0 - env.eps0() : 1.0;
      form.c = 0.5;
      form.g = [=](double x) { return scale * (1.0 - x) * vs + v0 * x; };
      form.dg = [=](double) { return v0 - scale * vs; };
      return form;
    }
    if (env.m == 1) {
      const double a = (lo ? 1.0 - env.eps0() : 1.0) * vs * vs;
      form.c = a;
      form.g = [=](double x) { return std::sqrt(a / (1.0 - (1.0 - a / (v0 * v0)) * x)); };
      return form;
    }
    throw UnavailableError("flow_form: no closed-form magnitude bound for m >= 2");
  }

  const AngleRates c = angle_rates(env);
  const double ct = cot_half(env.phi0);
  if (lo) {
    form.c = c.lower;
    form.g = [=](double x) { return kPi - 2.0 * ct * x; };
    form.dg = [=](double) { return -2.0 * ct; };
  } else {
    // Unclipped; the descent bound uses (1 - 3 c eta)^T for the cubic term
    // where this form gives (1 - c eta)^{3T}.
    form.c = c.upper;
    form.g = [=](double x) { return kPi - 2.0 * ct * x + (2.0 / 3.0) * ct * ct * ct * x * x * x; };
    form.dg = [=](double x) { return -2.0 * ct + 2.0 * ct * ct * ct * x * x; };
  }
  return form;
}

long long stopping_time(const BoundEnvelope& env, double eta, double eps, Warnings* warnings) {
  if (env.kind != BoundKind::angle) throw DomainError("stopping_time: needs an angle envelope");
  env.validate();
  if (!(eta > 0.0) || !(eps > 0.0)) throw DomainError("stopping_time: eta and eps must be positive");
  const double c = angle_rates(env).lower;
  if (eta > 0.1 / c) warn(warnings, "stopping_time: eta above 0.1 x threshold");
  const double base = 1.0 - c * eta;
  if (base <= 0.0) throw DomainError("stopping_time: 1 - c eta <= 0");
  const double arg = 0.5 * eps * std::tan(0.5 * env.phi0);
  if (arg >= 1.0) return 0;
  const double x = std::log(arg) / std::log(base);
  return static_cast<long long>(std::floor(x)) + 1;
}

EnvelopeReport check_gd_envelope(const Trajectory& traj, const BoundEnvelope& env, double eta,
                                 double slack, Warnings* warnings) {
  bool warned = false;
  return check_envelope_with(traj, env, slack, [&](double t) {
    Warnings local;
    const Interval b = gd_bounds(env, eta, std::llround(t), &local);
    if (!warned && !local.empty()) {
      for (const auto& w : local) warn(warnings, w);
      warned = true;
    }
    return b;
  });
}

}  // namespace srn
