#include "srn/kernels.hpp"

#include <algorithm>

#include "srn/rng.hpp"

namespace srn::kernels {

namespace {

std::size_t chunk_count(std::size_t n, std::size_t chunk) { return (n + chunk - 1) / chunk; }

MomentSums chunk_moment(Moment kind, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                        std::size_t count, std::uint64_t seed, std::uint64_t stream, Sampling dist) {
  const Eigen::Index d = u.size();
  const Eigen::Index dim = kind == Moment::relu_product ? 1 : d;
  MomentSums s{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim), count};
  RandomStream rng(seed, stream);
  Eigen::VectorXd x(d);
  for (std::size_t i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x[j] = rng.normal();
    if (dist == Sampling::sphere) x /= x.norm();
    const double pu = u.dot(x);
    if (kind == Moment::relu_product) {
      const double val = std::max(pu, 0.0) * std::max(v.dot(x), 0.0);
      s.sum(0, 0) += val;
      s.sum_sq(0, 0) += val * val;
      continue;
    }
    if (pu <= 0.0) continue;
    if (kind == Moment::double_wedge && v.dot(x) <= 0.0) continue;
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = c; r < d; ++r) {
        const double val = x[r] * x[c];
        s.sum(r, c) += val;
        s.sum_sq(r, c) += val * val;
      }
    }
  }
  if (kind != Moment::relu_product) {
    s.sum.triangularView<Eigen::StrictlyUpper>() = s.sum.transpose();
    s.sum_sq.triangularView<Eigen::StrictlyUpper>() = s.sum_sq.transpose();
  }
  return s;
}

MomentSums reduce_ordered(std::vector<MomentSums>& parts) {
  MomentSums total = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    total.sum += parts[i].sum;
    total.sum_sq += parts[i].sum_sq;
    total.n += parts[i].n;
  }
  return total;
}

std::size_t chunk_size(std::size_t n, std::size_t c) {
  return std::min(kSampleChunk, n - c * kSampleChunk);
}

EmpiricalGradient chunk_gradient(const RowMatrix& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                 double p, Eigen::Index begin, Eigen::Index end) {
  EmpiricalGradient g{Eigen::VectorXd::Zero(w.size()), 0.0, 0.0};
  for (Eigen::Index i = begin; i < end; ++i) {
    const double pre = x.row(i).dot(w);
    const double act = pre > 0.0 ? pre : 0.0;
    const double resid = p * act - y[i];
    g.loss += 0.5 * resid * resid;
    g.residual_dot += resid * act;
    if (pre > 0.0) g.grad_w.noalias() += (resid * p) * x.row(i).transpose();
  }
  return g;
}

EmpiricalGradient finish(std::vector<EmpiricalGradient>& parts, Eigen::Index n) {
  EmpiricalGradient total = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    total.grad_w += parts[i].grad_w;
    total.residual_dot += parts[i].residual_dot;
    total.loss += parts[i].loss;
  }
  const double inv = 1.0 / static_cast<double>(n);
  total.grad_w *= inv;
  total.residual_dot *= inv;
  total.loss *= inv;
  return total;
}

}  // namespace

MomentSums moment_sums_parallel(Moment kind, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                std::size_t n, std::uint64_t seed, Sampling dist) {
  const std::size_t chunks = chunk_count(n, kSampleChunk);
  std::vector<MomentSums> parts(chunks);
#pragma omp parallel for schedule(dynamic)
  for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
    const auto cu = static_cast<std::size_t>(c);
    parts[cu] = chunk_moment(kind, u, v, chunk_size(n, cu), seed, cu, dist);
  }
  return reduce_ordered(parts);
}

MomentSums moment_sums_serial(Moment kind, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                              std::size_t n, std::uint64_t seed, Sampling dist) {
  const std::size_t chunks = chunk_count(n, kSampleChunk);
  std::vector<MomentSums> parts(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    parts[c] = chunk_moment(kind, u, v, chunk_size(n, c), seed, c, dist);
  }
  return reduce_ordered(parts);
}

EmpiricalGradient empirical_gradient_parallel(const RowMatrix& x, const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& w, double p) {
  const Eigen::Index n = x.rows();
  const Eigen::Index chunks = (n + kRowChunk - 1) / kRowChunk;
  std::vector<EmpiricalGradient> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    parts[static_cast<std::size_t>(c)] =
        chunk_gradient(x, y, w, p, c * kRowChunk, std::min(n, (c + 1) * kRowChunk));
  }
  return finish(parts, n);
}

EmpiricalGradient empirical_gradient_serial(const RowMatrix& x, const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& w, double p) {
  // Plain single pass; agrees with the chunked version up to summation order.
  const Eigen::Index n = x.rows();
  EmpiricalGradient g{Eigen::VectorXd::Zero(w.size()), 0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    double pre = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) pre += x(i, j) * w[j];
    const double act = pre > 0.0 ? pre : 0.0;
    const double resid = p * act - y[i];
    g.loss += 0.5 * resid * resid;
    g.residual_dot += resid * act;
    if (pre > 0.0) {
      for (Eigen::Index j = 0; j < w.size(); ++j) g.grad_w[j] += resid * p * x(i, j);
    }
  }
  g.grad_w /= static_cast<double>(n);
  g.residual_dot /= static_cast<double>(n);
  g.loss /= static_cast<double>(n);
  return g;
}

}  // namespace srn::kernels
