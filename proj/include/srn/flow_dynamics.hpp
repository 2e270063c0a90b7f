#pragma once

#include <vector>

#include "srn/population.hpp"

namespace srn {

/// Initial-value problem for the reduced (magnitude, angle) gradient flow.
struct FlowSpec {
  int m = 0;
  double target_norm = 1.0;
  PolarState initial;
  double t_end = 1.0;
  double dt = 1e-3;

  void validate() const;
};

/// Time-indexed samples of a flow or descent run.
///
/// `times` holds flow time for integrators and the step index for gradient
/// descent. `losses` and `hidden` are optional channels (empty when unused).
struct Trajectory {
  std::vector<double> times;
  std::vector<PolarState> states;
  std::vector<double> losses;
  std::vector<std::vector<double>> hidden;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

struct PolarRate {
  double dv = 0.0;
  double dphi = 0.0;
};

/// eps(phi) = 1 - (sin phi - phi cos phi) / pi, evaluated without cancellation near pi.
double angle_gap(double phi);

/// Right-hand side of the reduced system
///   dv/dt   = -1/2 v^m (v^{m+1} - v*^{m+1} (1 - eps(phi)))
///   dphi/dt = v^{m-1} v*^{m+1} phi sin(phi) / (2 pi)
/// (m = 0 is the one-layer system). Requires v > 0 and phi in (0, pi).
PolarRate polar_rhs(int m, double target_norm, const PolarState& state);

/// Gradient-flow velocity -dL/d(w, v_1..v_m).
Gradient vector_rhs(const NeuronConfig& config, const WeightState& state);

/// Classical RK4 on polar_rhs. Records every `sample_every` steps plus the final state.
Trajectory integrate_polar(const FlowSpec& spec, int sample_every);

/// Classical RK4 on vector_rhs; records polar state, population loss and hidden scalars.
Trajectory integrate_vector(const NeuronConfig& config, const WeightState& init, double t_end,
                            double dt, int sample_every);

}  // namespace srn
