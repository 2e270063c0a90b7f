#include "srn/population.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "srn/errors.hpp"

namespace srn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-10;
constexpr double kMinNorm = 1e-300;

void require_unit(const Vec& u, const char* who) {
  if (std::abs(u.norm() - 1.0) > kUnitTol) {
    throw DomainError(std::string(who) + ": expected a unit vector");
  }
}

}  // namespace

double NeuronConfig::target_product() const {
  return std::pow(target_v, m);
}

void NeuronConfig::validate() const {
  if (m < 0) throw DomainError("NeuronConfig: m must be non-negative");
  if (target_w.size() == 0) throw DimensionError("NeuronConfig: empty target vector");
  if (!(target_norm() > 0.0)) throw DomainError("NeuronConfig: target vector is zero");
  if (m >= 1) {
    if (!(target_v > 0.0)) throw DomainError("NeuronConfig: target_v must be positive");
    if (std::abs(target_norm() - target_v) > 1e-12 * target_v) {
      throw DomainError("NeuronConfig: balanced target requires ||w*|| == v*");
    }
  }
}

NeuronConfig NeuronConfig::balanced(Vec target_w, int m) {
  NeuronConfig c;
  c.m = m;
  c.target_v = target_w.norm();
  c.target_w = std::move(target_w);
  c.validate();
  return c;
}

double WeightState::hidden_product() const {
  double p = 1.0;
  for (double v : hidden) p *= v;
  return p;
}

WeightState WeightState::balanced(Vec w, int m) {
  WeightState s;
  s.hidden.assign(static_cast<std::size_t>(m), w.norm());
  s.w = std::move(w);
  return s;
}

void check_consistent(const NeuronConfig& config, const WeightState& state) {
  if (state.w.size() != config.target_w.size()) {
    throw DimensionError("weight vector dimension does not match the target");
  }
  if (static_cast<int>(state.hidden.size()) != config.m) {
    throw DimensionError("number of hidden scalars does not match m");
  }
}

double angle_between(const Vec& a, const Vec& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kMinNorm || nb < kMinNorm) {
    throw ZeroVectorError("angle_between: zero vector");
  }
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

Mat half_space_second_moment(const Vec& u) {
  require_unit(u, "half_space_second_moment");
  const auto d = u.size();
  return 0.5 * Mat::Identity(d, d);
}

Mat double_wedge_second_moment(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw DimensionError("double_wedge_second_moment: size mismatch");
  require_unit(u, "double_wedge_second_moment");
  require_unit(v, "double_wedge_second_moment");
  const double cos_t = std::clamp(u.dot(v), -1.0, 1.0);
  const double theta = std::acos(cos_t);
  const double sin_t = std::sin(theta);
  if (std::abs(sin_t) < 1e-10) {
    throw DegenerateAngleError("double_wedge_second_moment: u and v are (anti)parallel");
  }
  const auto d = u.size();
  Mat out = 0.5 * (1.0 - theta / kPi) * Mat::Identity(d, d);
  const double scale = 1.0 / (2.0 * kPi * sin_t);
  out += scale * (-cos_t * (u * u.transpose() + v * v.transpose()) + v * u.transpose() +
                  u * v.transpose());
  return out;
}

double relu_product_moment(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("relu_product_moment: theta outside [0, pi]");
  }
  return 0.5 * (1.0 - theta / kPi) * std::cos(theta) + std::sin(theta) / (2.0 * kPi);
}

double population_loss(const NeuronConfig& config, const WeightState& state) {
  check_consistent(config, state);
  const double p = state.hidden_product();
  const double p_star = config.target_product();
  const double nw = state.w.norm();
  const double ns = config.target_norm();

  const double self = p * p * 0.5 * nw * nw;
  const double target = p_star * p_star * 0.5 * ns * ns;
  double cross = 0.0;
  if (nw >= kMinNorm) {
    cross = p * p_star * nw * ns * relu_product_moment(angle_between(state.w, config.target_w));
  }
  return std::max(0.0, 0.5 * (self - 2.0 * cross + target));
}

Gradient population_gradient(const NeuronConfig& config, const WeightState& state) {
  check_consistent(config, state);
  const double nw = state.w.norm();
  if (nw < kMinNorm) throw ZeroVectorError("population_gradient: ||w|| is zero");
  for (double v : state.hidden) {
    if (!(v > 0.0)) throw DomainError("population_gradient: hidden scalars must be positive");
  }

  const double p = state.hidden_product();
  const double p_star = config.target_product();
  const double ns = config.target_norm();
  const double theta = angle_between(state.w, config.target_w);
  const double phi = kPi - theta;

  // E[1{w>0} x x^T] w = w/2 and E[1{w>0}1{w*>0} x x^T] w* = (phi w* + ||w*|| sin(theta) w/||w||) / 2pi
  Gradient g;
  g.w = 0.5 * p * p * state.w -
        p * p_star / (2.0 * kPi) * (phi * config.target_w + ns * std::sin(theta) / nw * state.w);

  // dL/dv_k = (p / v_k) * (p ||w||^2 / 2 - p* ||w|| ||w*|| kappa(theta))
  const double inner = p * 0.5 * nw * nw - p_star * nw * ns * relu_product_moment(theta);
  g.hidden.resize(state.hidden.size());
  for (std::size_t k = 0; k < state.hidden.size(); ++k) {
    g.hidden[k] = p / state.hidden[k] * inner;
  }
  return g;
}

PolarState polar_of(const NeuronConfig& config, const WeightState& state) {
  const double nw = state.w.norm();
  if (nw < kMinNorm) throw ZeroVectorError("polar_of: ||w|| is zero");
  return {nw, kPi - angle_between(state.w, config.target_w)};
}

}  // namespace srn
