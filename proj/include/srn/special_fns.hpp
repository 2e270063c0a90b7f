#pragma once

#include <cstddef>
#include <functional>

namespace srn {

/// Parameters (a, b; c) of the Gaussian hypergeometric function 2F1(a, b; c; z).
struct Hyp2F1Params {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
};

struct SeriesOptions {
  /// Summation stops once |term| < rel_tol * |partial sum|.
  double rel_tol = 1e-16;
  std::size_t max_terms = 1'000'000;
};

/// 2F1(a, b; c; z) by direct power series, for real z < 1.
///
/// Throws DomainError when z >= 1 or c is a non-positive integer, and
/// ConvergenceError when the series needs more than max_terms terms.
double hyp2f1(const Hyp2F1Params& p, double z, const SeriesOptions& opts = {});

/// Exact solution map of dphi/ds = sin(phi): 2 atan(tan(phi0 / 2) e^s).
double angle_from_tan_flow(double phi0, double s);

struct BisectOptions {
  /// Stop when the bracket is narrower than this.
  double x_tol = 1e-12;
  /// Stop when |f(x)| <= f_tol. Zero means only an exact zero stops early.
  double f_tol = 1e-12;
  int max_iter = 400;
};

/// Bisection on a sign-changing bracket [lo, hi].
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           const BisectOptions& opts);

/// Bisection with a single tolerance used for both the bracket width and the residual.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol);

}  // namespace srn
