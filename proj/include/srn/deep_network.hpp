#pragma once

// Fully connected bias-free ReLU network used for the general-architecture
// magnitude experiment: depth weight matrices, every hidden layer `width` wide,
// scalar output, identity on the output layer.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace srn {

struct DeepShape {
  int input_dim = 20;
  int depth = 5;
  int width = 50;

  void validate() const;
};

class DeepNetwork {
 public:
  DeepNetwork() = default;
  explicit DeepNetwork(std::vector<Eigen::MatrixXd> layers);

  /// Entries i.i.d. N(0, k).
  static DeepNetwork gaussian(const DeepShape& shape, double k, std::uint64_t seed);

  /// One output per row of x (n x input_dim).
  Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;

  /// Norm of all parameters stacked into one vector.
  double parameter_norm() const;

  const std::vector<Eigen::MatrixXd>& layers() const { return layers_; }

  /// Full-batch gradient step on mean 1/2 (f(x) - y)^2. Returns the loss before the step.
  double gd_step(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double eta);

  double loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const;

 private:
  std::vector<Eigen::MatrixXd> layers_;
};

struct DeepRun {
  std::vector<long long> steps;
  std::vector<double> norms;
  std::vector<double> losses;
};

/// Trains `student` toward labels produced by `teacher` on n Gaussian inputs.
DeepRun train_deep(DeepNetwork student, const DeepNetwork& teacher, std::size_t n, double eta,
                   long long steps, long long record_every, std::uint64_t seed);

enum class Trend { increasing, decreasing };

/// Worst violation of the trend among samples past the first burn_in_fraction of
/// the run, as a fraction of the norm (0 when monotone).
double trend_violation(const DeepRun& run, Trend trend, double burn_in_fraction);

}  // namespace srn
