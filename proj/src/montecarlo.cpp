#include "srn/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srn/errors.hpp"
#include "srn/rng.hpp"

namespace srn {

namespace {

void require_unit(const Vec& u, const char* who) {
  if (u.size() == 0 || std::abs(u.norm() - 1.0) > 1e-10) {
    throw DomainError(std::string(who) + ": direction must be a unit vector");
  }
}

McEstimate finish(const kernels::MomentSums& s, std::uint64_t seed) {
  const double n = static_cast<double>(s.n);
  McEstimate est;
  est.n = s.n;
  est.seed = seed;
  est.value = s.sum / n;
  const Mat var = ((s.sum_sq - n * est.value.cwiseProduct(est.value)) / (n - 1.0)).cwiseMax(0.0);
  est.stderr_ = (var / n).cwiseSqrt();
  return est;
}

void require_samples(std::size_t n) {
  if (n < 2) throw DomainError("Monte Carlo estimate needs n >= 2");
}

}  // namespace

McEstimate mc_half_space_moment(const Vec& u, std::size_t n, std::uint64_t seed, Sampling dist) {
  require_unit(u, "mc_half_space_moment");
  require_samples(n);
  return finish(kernels::moment_sums_parallel(kernels::Moment::half_space, u, u, n, seed, dist), seed);
}

McEstimate mc_double_wedge_moment(const Vec& u, const Vec& v, std::size_t n, std::uint64_t seed,
                                  Sampling dist) {
  require_unit(u, "mc_double_wedge_moment");
  require_unit(v, "mc_double_wedge_moment");
  if (u.size() != v.size()) throw DimensionError("mc_double_wedge_moment: size mismatch");
  require_samples(n);
  return finish(kernels::moment_sums_parallel(kernels::Moment::double_wedge, u, v, n, seed, dist), seed);
}

McEstimate mc_relu_product(const Vec& u, const Vec& v, std::size_t n, std::uint64_t seed) {
  require_unit(u, "mc_relu_product");
  require_unit(v, "mc_relu_product");
  if (u.size() != v.size()) throw DimensionError("mc_relu_product: size mismatch");
  require_samples(n);
  return finish(kernels::moment_sums_parallel(kernels::Moment::relu_product, u, v, n, seed,
                                              Sampling::gaussian),
                seed);
}

ConcentrationResult angle_concentration(int d, double eps, std::size_t trials, std::uint64_t seed) {
  if (d < 1 || !(eps > 0.0) || trials < 2) {
    throw DomainError("angle_concentration: need d >= 1, eps > 0, trials >= 2");
  }
  RandomStream rng(seed, 0xc0c0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Vec a = rng.normal_vector(d);
    const Vec b = rng.normal_vector(d);
    if (a.dot(b) / (a.norm() * b.norm()) < eps) ++hits;
  }
  ConcentrationResult res;
  res.trials = trials;
  res.fraction = static_cast<double>(hits) / static_cast<double>(trials);
  res.bound = 1.0 - 2.0 * std::exp(-0.5 * d * eps * eps);
  // Binomial error at the bound, so a perfect sample does not collapse to zero.
  const double p = res.bound > 0.0 ? res.bound : res.fraction;
  res.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return res;
}

Mat z_scores(const McEstimate& est, const Mat& expected) {
  if (est.value.rows() != expected.rows() || est.value.cols() != expected.cols()) {
    throw DimensionError("z_scores: shape mismatch");
  }
  Mat z = Mat::Zero(expected.rows(), expected.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double diff = est.value(i, j) - expected(i, j);
      const double se = est.stderr_(i, j);
      if (se > 0.0) {
        z(i, j) = diff / se;
      } else {
        z(i, j) = std::abs(diff) < 1e-15 ? 0.0 : std::numeric_limits<double>::infinity();
      }
    }
  }
  return z;
}

}  // namespace srn
