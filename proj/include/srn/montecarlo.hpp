#pragma once

// Brute-force sampling oracles for the closed-form population statistics.

#include <cstdint>

#include "srn/kernels.hpp"
#include "srn/population.hpp"

namespace srn {

using kernels::Sampling;

/// Sample mean with per-entry standard errors (1x1 for scalar estimates).
struct McEstimate {
  Mat value;
  Mat stderr_;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  double scalar() const { return value(0, 0); }
  double scalar_stderr() const { return stderr_(0, 0); }
};

/// Mean of 1{u.x > 0} x x^T. Requires unit u and n >= 2.
McEstimate mc_half_space_moment(const Vec& u, std::size_t n, std::uint64_t seed,
                                Sampling dist = Sampling::gaussian);

/// Mean of 1{u.x > 0} 1{v.x > 0} x x^T.
McEstimate mc_double_wedge_moment(const Vec& u, const Vec& v, std::size_t n, std::uint64_t seed,
                                  Sampling dist = Sampling::gaussian);

/// Mean of sigma(u.x) sigma(v.x), x ~ N(0, I).
McEstimate mc_relu_product(const Vec& u, const Vec& v, std::size_t n, std::uint64_t seed);

struct ConcentrationResult {
  double fraction = 0.0;
  /// 1 - 2 exp(-d eps^2 / 2); negative when vacuous.
  double bound = 0.0;
  /// Binomial standard error of `fraction`.
  double stderr_ = 0.0;
  std::size_t trials = 0;

  bool consistent() const { return fraction >= bound - 3.0 * stderr_; }
};

/// Share of independent Gaussian pairs (u, v) in R^d with cos(u, v) < eps.
ConcentrationResult angle_concentration(int d, double eps, std::size_t trials, std::uint64_t seed);

/// Entrywise (estimate - expected) / stderr. Zero stderr gives 0 on an exact
/// match and infinity otherwise.
Mat z_scores(const McEstimate& est, const Mat& expected);

}  // namespace srn
