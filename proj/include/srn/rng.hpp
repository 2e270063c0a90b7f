#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace srn {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Owned, explicitly seeded random stream. Stream `k` of seed `s` is
/// independent of stream `j != k`, so chunks of work can be assigned fixed
/// streams and reduced in order regardless of thread count.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL))) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd x(d);
    for (Eigen::Index i = 0; i < d; ++i) x[i] = normal();
    return x;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace srn
