#include "srn/special_fns.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "srn/errors.hpp"

namespace srn {

namespace {

bool is_non_positive_integer(double x) {
  return x <= 0.0 && std::floor(x) == x;
}

}  // namespace

double hyp2f1(const Hyp2F1Params& p, double z, const SeriesOptions& opts) {
  if (!(z < 1.0)) {
    throw DomainError("hyp2f1: argument z = " + std::to_string(z) + " is not below 1");
  }
  if (is_non_positive_integer(p.c)) {
    throw DomainError("hyp2f1: c is a non-positive integer");
  }

  double sum = 1.0;
  double term = 1.0;
  for (std::size_t k = 0; k < opts.max_terms; ++k) {
    const double kd = static_cast<double>(k);
    term *= (p.a + kd) * (p.b + kd) / ((p.c + kd) * (kd + 1.0)) * z;
    if (term == 0.0) {
      return sum;  // terminating series (a or b a non-positive integer), or z == 0
    }
    sum += term;
    if (!std::isfinite(sum)) {
      throw ConvergenceError("hyp2f1: partial sum is not finite");
    }
    if (std::abs(term) < opts.rel_tol * std::abs(sum)) {
      return sum;
    }
  }
  throw ConvergenceError("hyp2f1: series did not converge within " +
                         std::to_string(opts.max_terms) + " terms");
}

double angle_from_tan_flow(double phi0, double s) {
  if (!(phi0 > 0.0 && phi0 < std::numbers::pi)) {
    throw DomainError("angle_from_tan_flow: phi0 must lie in (0, pi)");
  }
  return 2.0 * std::atan(std::tan(0.5 * phi0) * std::exp(s));
}

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           const BisectOptions& opts) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (f_lo * f_hi > 0.0 || std::isnan(f_lo) || std::isnan(f_hi)) {
    throw BracketError("find_root_bracketed: f(lo) and f(hi) have the same sign");
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    if (std::abs(hi - lo) <= opts.x_tol || mid == lo || mid == hi) {
      return mid;
    }
    const double f_mid = f(mid);
    if (std::abs(f_mid) <= opts.f_tol) {
      return mid;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol) {
  return find_root_bracketed(f, lo, hi, BisectOptions{.x_tol = tol, .f_tol = tol});
}

}  // namespace srn
