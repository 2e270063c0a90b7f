#pragma once

// Closed-form population statistics for single-ReLU-neuron networks
// f(x) = v_1 ... v_m sigma(w^T x) with x ~ N(0, I).

#include <vector>

#include <Eigen/Dense>

namespace srn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Problem instance: target weight vector and m hidden target scalars.
///
/// For m >= 1 the target is balanced: all m target scalars equal target_v and
/// ||target_w|| == target_v.
struct NeuronConfig {
  int m = 0;
  Vec target_w;
  double target_v = 1.0;

  int dim() const { return static_cast<int>(target_w.size()); }
  double target_norm() const { return target_w.norm(); }
  /// Product of the hidden target scalars, target_v^m.
  double target_product() const;
  void validate() const;

  /// Balanced target with target_v = ||target_w||.
  static NeuronConfig balanced(Vec target_w, int m);
};

/// Trainable parameters: weight vector w and hidden scalars v_1..v_m.
struct WeightState {
  Vec w;
  std::vector<double> hidden;

  double hidden_product() const;
  /// Balanced state: every hidden scalar equals ||w||.
  static WeightState balanced(Vec w, int m);
};

/// Reduced state: magnitude ||w|| and angle phi = pi - theta(w, w*).
struct PolarState {
  double magnitude = 0.0;
  double angle = 0.0;
};

/// Gradient (or velocity) with the same layout as WeightState.
struct Gradient {
  Vec w;
  std::vector<double> hidden;
};

/// Angle between two non-zero vectors, cosine clamped to [-1, 1].
double angle_between(const Vec& a, const Vec& b);

/// E[1{u^T x > 0} x x^T] = I / 2.
Mat half_space_second_moment(const Vec& u);

/// E[1{u^T x > 0} 1{v^T x > 0} x x^T] for unit u, v at angle theta.
/// Throws DegenerateAngleError when |sin theta| < 1e-10.
Mat double_wedge_second_moment(const Vec& u, const Vec& v);

/// E[sigma(u^T x) sigma(v^T x)] for unit u, v at angle theta in [0, pi].
double relu_product_moment(double theta);

double population_loss(const NeuronConfig& config, const WeightState& state);

/// Exact gradient of population_loss with respect to w and each hidden scalar.
/// Requires ||w|| >= 1e-300 and all hidden scalars positive.
Gradient population_gradient(const NeuronConfig& config, const WeightState& state);

PolarState polar_of(const NeuronConfig& config, const WeightState& state);

/// Throws DimensionError when state does not match config.
void check_consistent(const NeuronConfig& config, const WeightState& state);

}  // namespace srn
