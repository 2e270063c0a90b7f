#pragma once

// Data-parallel inner loops, each with an OpenMP version and a serial
// reference. Parallel versions split work into fixed chunks and reduce the
// partial sums in chunk order, so results do not depend on the thread count.
// The Monte Carlo reference walks the same chunks (and RNG streams) serially
// and is bitwise equal; the gradient reference is a plain single loop.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace srn::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kSampleChunk = 8192;
inline constexpr Eigen::Index kRowChunk = 256;

enum class Sampling { gaussian, sphere };

/// Which Monte Carlo integrand to accumulate.
enum class Moment {
  half_space,    // 1{u.x > 0} x x^T
  double_wedge,  // 1{u.x > 0} 1{v.x > 0} x x^T
  relu_product,  // sigma(u.x) sigma(v.x)   (1x1)
};

/// Per-entry sums of an integrand and of its square.
struct MomentSums {
  Eigen::MatrixXd sum;
  Eigen::MatrixXd sum_sq;
  std::size_t n = 0;
};

MomentSums moment_sums_parallel(Moment kind, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                std::size_t n, std::uint64_t seed, Sampling dist);
MomentSums moment_sums_serial(Moment kind, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                              std::size_t n, std::uint64_t seed, Sampling dist);

/// Full-batch gradient of the mean of 1/2 (p sigma(w.x) - y)^2 over the rows of x.
///
/// Returns the w-gradient in `grad_w` (already multiplied by p) and
/// mean[(p sigma(w.x) - y) sigma(w.x)] in `residual_dot` (the hidden-scalar
/// gradient is residual_dot * p / v_k). sigma'(0) = 0.
struct EmpiricalGradient {
  Eigen::VectorXd grad_w;
  double residual_dot = 0.0;
  double loss = 0.0;
};

EmpiricalGradient empirical_gradient_parallel(const RowMatrix& x, const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& w, double p);
EmpiricalGradient empirical_gradient_serial(const RowMatrix& x, const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& w, double p);

}  // namespace srn::kernels
