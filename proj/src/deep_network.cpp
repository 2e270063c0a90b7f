#include "srn/deep_network.hpp"

#include <algorithm>
#include <cmath>

#include "srn/errors.hpp"
#include "srn/rng.hpp"

namespace srn {

void DeepShape::validate() const {
  if (input_dim < 1 || depth < 1 || width < 1) throw DomainError("DeepShape: sizes must be positive");
}

DeepNetwork::DeepNetwork(std::vector<Eigen::MatrixXd> layers) : layers_(std::move(layers)) {
  if (layers_.empty() || layers_.back().rows() != 1) {
    throw DimensionError("DeepNetwork: need at least one layer and a scalar output");
  }
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    if (layers_[i].cols() != layers_[i - 1].rows()) throw DimensionError("DeepNetwork: layer shapes do not chain");
  }
}

DeepNetwork DeepNetwork::gaussian(const DeepShape& shape, double k, std::uint64_t seed) {
  shape.validate();
  if (!(k > 0.0)) throw DomainError("DeepNetwork::gaussian: k must be positive");
  RandomStream rng(seed, 0xdee9);
  const double sd = std::sqrt(k);
  std::vector<Eigen::MatrixXd> layers;
  int in = shape.input_dim;
  for (int l = 0; l < shape.depth; ++l) {
    const int out = l + 1 == shape.depth ? 1 : shape.width;
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = sd * rng.normal();
    }
    layers.push_back(std::move(w));
    in = out;
  }
  return DeepNetwork(std::move(layers));
}

Eigen::VectorXd DeepNetwork::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = h * layers_[l].transpose();
    if (l + 1 < layers_.size()) h = h.cwiseMax(0.0);
  }
  return h.col(0);
}

double DeepNetwork::parameter_norm() const {
  double s = 0.0;
  for (const auto& w : layers_) s += w.squaredNorm();
  return std::sqrt(s);
}

double DeepNetwork::loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
  return 0.5 * (forward(x) - y).squaredNorm() / static_cast<double>(x.rows());
}

double DeepNetwork::gd_step(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double eta) {
  const std::size_t L = layers_.size();
  std::vector<Eigen::MatrixXd> acts(L);  // input to layer l
  acts[0] = x;
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l + 1 < L; ++l) {
    h = (h * layers_[l].transpose()).cwiseMax(0.0);
    acts[l + 1] = h;
  }
  const Eigen::VectorXd out = h * layers_[L - 1].transpose();
  const Eigen::VectorXd resid = out - y;
  const double n = static_cast<double>(x.rows());
  const double loss = 0.5 * resid.squaredNorm() / n;

  Eigen::MatrixXd delta = resid / n;  // n x 1
  for (std::size_t l = L; l-- > 0;) {
    const Eigen::MatrixXd grad = delta.transpose() * acts[l];
    if (l > 0) {
      delta = (delta * layers_[l]).cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    }
    layers_[l] -= eta * grad;
  }
  if (!std::isfinite(loss)) throw BlowUpError("DeepNetwork::gd_step: loss is not finite");
  return loss;
}

DeepRun train_deep(DeepNetwork student, const DeepNetwork& teacher, std::size_t n, double eta,
                   long long steps, long long record_every, std::uint64_t seed) {
  if (n < 1 || steps < 1 || record_every < 1 || !(eta > 0.0)) {
    throw DomainError("train_deep: need n, steps, record_every >= 1 and eta > 0");
  }
  const auto d = teacher.layers().front().cols();
  RandomStream rng(seed, 0xda7a);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
  }
  const Eigen::VectorXd y = teacher.forward(x);

  DeepRun run;
  for (long long t = 0; t < steps; ++t) {
    const double before = student.parameter_norm();
    const double loss = student.gd_step(x, y, eta);
    if (t % record_every == 0) {
      run.steps.push_back(t);
      run.norms.push_back(before);
      run.losses.push_back(loss);
    }
  }
  run.steps.push_back(steps);
  run.norms.push_back(student.parameter_norm());
  run.losses.push_back(student.loss(x, y));
  return run;
}

double trend_violation(const DeepRun& run, Trend trend, double burn_in_fraction) {
  if (run.steps.empty()) return 0.0;
  const double cut = burn_in_fraction * static_cast<double>(run.steps.back());
  double worst = 0.0;
  for (std::size_t i = 1; i < run.steps.size(); ++i) {
    if (static_cast<double>(run.steps[i - 1]) < cut) continue;
    const double diff = run.norms[i] - run.norms[i - 1];
    const double bad = trend == Trend::increasing ? -diff : diff;
    worst = std::max(worst, bad / run.norms[i - 1]);
  }
  return worst;
}

}  // namespace srn
