#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srn/bounds.hpp"
#include "srn/kernels.hpp"
#include "srn/population.hpp"

namespace srn {

enum class DescentMode { population, empirical };

struct DescentConfig {
  double eta = 1e-3;
  long long steps = 1000;
  DescentMode mode = DescentMode::population;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  long long record_every = 1;

  void validate() const;
};

/// Fixed training set: rows of x ~ N(0, I) and labels y = f*(x).
struct Dataset {
  kernels::RowMatrix x;
  Vec y;
};

Dataset make_dataset(const NeuronConfig& config, std::size_t n, std::uint64_t seed);

/// w0 ~ N(0, k I) in dimension d; hidden scalars all set to ||w0||.
WeightState gaussian_init(int d, int m, double k, std::uint64_t seed);

/// Optional sink for non-fatal diagnostics (learning rate outside the clean regime, ...).
using Warnings = std::vector<std::string>;

/// One step of gradient descent. Population mode when `batch` is null,
/// otherwise full-batch gradient of the mean squared error on `batch`.
/// Throws DomainError if a hidden scalar leaves (0, inf).
WeightState gd_step(const NeuronConfig& config, const WeightState& state, double eta,
                    const Dataset* batch = nullptr);

/// Iterates gd_step; `times` are step indices. Empirical mode draws its dataset
/// once from dc.seed. Throws BlowUpError if ||w|| exceeds 1e12.
Trajectory run_gd(const NeuronConfig& config, const WeightState& init, const DescentConfig& dc);

/// Same as run_gd but on a caller-supplied dataset (empirical mode).
Trajectory run_gd(const NeuronConfig& config, const WeightState& init, const DescentConfig& dc,
                  const Dataset& data);

/// Largest |(v_{k+1}^2 - v_k^2)(t) - (v_{k+1}^2 - v_k^2)(0)| over the recorded
/// samples, with v_0 := ||w||. Needs the `hidden` channel.
double balance_drift(const Trajectory& traj);

/// Flow solution of the form w(t) = g(exp(-c t)) with g one-to-one on [0, 1].
struct ExpFlowForm {
  double c = 1.0;
  std::function<double(double)> g;
  std::function<double(double)> dg;  // optional

  /// Strict monotonicity of g on a uniform grid of `points` points in [0, 1].
  bool is_injective(int points = 1000) const;
};

/// g((1 - c eta)^T). Throws DomainError when c eta > 0.1 or 1 - c eta <= 0;
/// warns when c eta > 0.01.
double gf_to_gd(const ExpFlowForm& form, double eta, long long T, Warnings* warnings = nullptr);

struct ErrorScalingRow {
  double eta = 0.0;
  long long steps = 0;
  double max_error = 0.0;
};

/// Explicit-Euler descent on w' = flow_rhs(w) from w(0) = g(1) for
/// round(horizon / eta) steps, recording max_T |w_T - g((1 - c eta)^T)| per eta.
std::vector<ErrorScalingRow> gd_error_scaling(const ExpFlowForm& form,
                                              const std::function<double(double)>& flow_rhs,
                                              const std::vector<double>& etas, double horizon);

/// Least-squares slope of log(max_error) against log(eta).
double loglog_slope(const std::vector<ErrorScalingRow>& rows);

/// Learning-rate ceiling the descent bound for `env` is stated under.
double gd_threshold(const BoundEnvelope& env);

enum class RateRegime { clean, acceptable, beyond };

/// clean: eta <= 0.01 * threshold; acceptable: <= 0.1 * threshold.
RateRegime rate_regime(const BoundEnvelope& env, double eta);

/// Descent envelopes: every exp(-c t) of the flow bound becomes (1 - c eta)^T,
/// T counted from env.anchor_time. Throws UnavailableError for magnitude with m >= 2.
Interval gd_bounds(const BoundEnvelope& env, double eta, long long T, Warnings* warnings = nullptr);

enum class EnvelopeSide { lower, upper };

/// The flow bound for `env` written as g(exp(-c t)) (closed-form bounds only).
ExpFlowForm flow_form(const BoundEnvelope& env, EnvelopeSide side);

/// Least T whose descent angle lower bound exceeds pi - eps. 0 when the bound
/// already holds at T = 0. Uses r for m >= 1 and R for m = 0.
long long stopping_time(const BoundEnvelope& env, double eta, double eps, Warnings* warnings = nullptr);

EnvelopeReport check_gd_envelope(const Trajectory& traj, const BoundEnvelope& env, double eta,
                                 double slack, Warnings* warnings = nullptr);

}  // namespace srn
