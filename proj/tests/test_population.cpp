#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "srn/errors.hpp"
#include "srn/population.hpp"
#include "srn/rng.hpp"

using namespace srn;

namespace {

constexpr double kPi = std::numbers::pi;

Vec unit(int d, std::uint64_t seed) {
  RandomStream rng(seed);
  Vec u = rng.normal_vector(d);
  return u / u.norm();
}

// Double-wedge moment in d = 2 by quadrature over the direction angle:
// E[...] = (1/pi) * integral over the wedge of e(a) e(a)^T da, since E r^3-part = 2 / (2 pi).
// With u = e_1 and v at angle t in (0, pi), the wedge is (t - pi/2, pi/2).
Mat wedge_quadrature_2d(const Vec& u, const Vec& v) {
  EXPECT_DOUBLE_EQ(u[0], 1.0);
  const double t = std::atan2(v[1], v[0]);
  const double lo = t - kPi / 2, hi = kPi / 2;
  const int steps = 20000;
  const double h = (hi - lo) / steps;
  Mat acc = Mat::Zero(2, 2);
  for (int i = 0; i < steps; ++i) {
    const double a = lo + (i + 0.5) * h;
    Vec e(2);
    e << std::cos(a), std::sin(a);
    acc += e * e.transpose() * h;
  }
  return acc / kPi;
}

// Central differences of population_loss over w and the hidden scalars.
Gradient finite_difference(const NeuronConfig& cfg, const WeightState& s, double h) {
  Gradient g;
  g.w = Vec::Zero(s.w.size());
  for (Eigen::Index i = 0; i < s.w.size(); ++i) {
    WeightState a = s, b = s;
    a.w[i] += h;
    b.w[i] -= h;
    g.w[i] = (population_loss(cfg, a) - population_loss(cfg, b)) / (2 * h);
  }
  for (std::size_t k = 0; k < s.hidden.size(); ++k) {
    WeightState a = s, b = s;
    a.hidden[k] += h;
    b.hidden[k] -= h;
    g.hidden.push_back((population_loss(cfg, a) - population_loss(cfg, b)) / (2 * h));
  }
  return g;
}

}  // namespace

TEST(HalfSpace, IsHalfIdentity) {
  Vec u(2);
  u << 1, 0;
  EXPECT_TRUE(half_space_second_moment(u).isApprox(0.5 * Mat::Identity(2, 2)));
  EXPECT_DOUBLE_EQ(half_space_second_moment(unit(3, 2)).trace(), 1.5);
}

TEST(HalfSpace, RejectsNonUnit) { EXPECT_THROW(half_space_second_moment(Vec::Ones(3)), DomainError); }

TEST(DoubleWedge, OrthogonalSubstitution) {
  Vec u(3), v(3);
  u << 1, 0, 0;
  v << 0, 1, 0;
  const Mat expected = 0.25 * Mat::Identity(3, 3) + (u * v.transpose() + v * u.transpose()) / (2 * kPi);
  EXPECT_TRUE(double_wedge_second_moment(u, v).isApprox(expected, 1e-15));
}

TEST(DoubleWedge, Symmetric) {
  const Vec u = unit(5, 3), v = unit(5, 4);
  const Mat a = double_wedge_second_moment(u, v);
  EXPECT_TRUE(a.isApprox(a.transpose(), 1e-15));
  EXPECT_TRUE(a.isApprox(double_wedge_second_moment(v, u), 1e-15));
}

TEST(DoubleWedge, MatchesPlanarQuadrature) {
  for (double theta : {0.3, kPi / 3, kPi / 2, 2.0, 2.9}) {
    Vec u(2), v(2);
    u << 1, 0;
    v << std::cos(theta), std::sin(theta);
    const Mat q = wedge_quadrature_2d(u, v);
    EXPECT_LT((double_wedge_second_moment(u, v) - q).cwiseAbs().maxCoeff(), 1e-6) << theta;
  }
}

TEST(DoubleWedge, SameDirectionIsHalfSpaceLimit) {
  Vec u(2), v(2);
  u << 1, 0;
  v << std::cos(1e-6), std::sin(1e-6);
  EXPECT_LT((double_wedge_second_moment(u, v) - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(DoubleWedge, DegenerateAngle) {
  const Vec u = unit(4, 5);
  EXPECT_THROW(double_wedge_second_moment(u, u), DegenerateAngleError);
  EXPECT_THROW(double_wedge_second_moment(u, -u), DegenerateAngleError);
}

TEST(ReluProduct, Substitutions) {
  EXPECT_DOUBLE_EQ(relu_product_moment(0.0), 0.5);
  EXPECT_NEAR(relu_product_moment(kPi), 0.0, 1e-16);
  EXPECT_NEAR(relu_product_moment(kPi / 2), 1.0 / (2 * kPi), 1e-16);
  EXPECT_NEAR(relu_product_moment(2 * kPi / 3), 0.0544988905221146790445, 1e-15);
  EXPECT_THROW(relu_product_moment(-0.1), DomainError);
}

TEST(Loss, ZeroAtTarget) {
  for (int m : {0, 1, 3}) {
    const NeuronConfig cfg = NeuronConfig::balanced(unit(4, 7) * 1.3, m);
    EXPECT_NEAR(population_loss(cfg, WeightState::balanced(cfg.target_w, m)), 0.0, 1e-14);
  }
}

TEST(Loss, OppositeDirection) {
  const NeuronConfig cfg = NeuronConfig::balanced(unit(4, 8) * 2.0, 0);
  EXPECT_NEAR(population_loss(cfg, WeightState::balanced(-cfg.target_w, 0)), 0.5 * 4.0, 1e-14);
}

TEST(Loss, NonNegative) {
  RandomStream rng(9);
  for (int i = 0; i < 50; ++i) {
    const int m = i % 4;
    const NeuronConfig cfg = NeuronConfig::balanced(rng.normal_vector(6), m);
    EXPECT_GE(population_loss(cfg, WeightState::balanced(rng.normal_vector(6), m)), 0.0);
  }
}

TEST(Gradient, ZeroAtTarget) {
  const NeuronConfig cfg = NeuronConfig::balanced(unit(5, 10) * 0.8, 2);
  const Gradient g = population_gradient(cfg, WeightState::balanced(cfg.target_w, 2));
  EXPECT_LT(g.w.cwiseAbs().maxCoeff(), 1e-14);
  for (double h : g.hidden) EXPECT_LT(std::abs(h), 1e-14);
}

TEST(Gradient, MatchesFiniteDifferences) {
  RandomStream rng(12);
  for (int m = 0; m <= 3; ++m) {
    for (int trial = 0; trial < 10; ++trial) {
      const NeuronConfig cfg = NeuronConfig::balanced(rng.normal_vector(4), m);
      WeightState s = WeightState::balanced(rng.normal_vector(4), m);
      for (double& v : s.hidden) v *= 0.8 + 0.4 * rng.uniform();  // unbalanced is fine here
      const Gradient g = population_gradient(cfg, s);
      const Gradient fd = finite_difference(cfg, s, 1e-6);
      const double scale = std::max(1.0, g.w.norm());
      EXPECT_LT((g.w - fd.w).norm() / scale, 1e-5) << "m=" << m;
      for (std::size_t k = 0; k < g.hidden.size(); ++k) {
        EXPECT_LT(std::abs(g.hidden[k] - fd.hidden[k]) / std::max(1.0, std::abs(g.hidden[k])), 1e-5);
      }
    }
  }
}

TEST(Gradient, BalancedScalarsAgree) {
  const NeuronConfig cfg = NeuronConfig::balanced(unit(5, 13), 2);
  const Gradient g = population_gradient(cfg, WeightState::balanced(unit(5, 14) * 0.7, 2));
  EXPECT_NEAR(g.hidden[0], g.hidden[1], 1e-15);
}

TEST(Gradient, Errors) {
  const NeuronConfig cfg = NeuronConfig::balanced(unit(3, 15), 1);
  EXPECT_THROW(population_gradient(cfg, WeightState::balanced(Vec::Zero(3), 1)), ZeroVectorError);
  WeightState neg = WeightState::balanced(unit(3, 16), 1);
  neg.hidden[0] = -1.0;
  EXPECT_THROW(population_gradient(cfg, neg), DomainError);
  EXPECT_THROW(population_gradient(cfg, WeightState::balanced(unit(4, 16), 1)), DimensionError);
  EXPECT_THROW(population_gradient(cfg, WeightState::balanced(unit(3, 16), 2)), DimensionError);
}

TEST(Polar, Examples) {
  Vec ws(3);
  ws << 0, 0, 1.5;
  const NeuronConfig cfg = NeuronConfig::balanced(ws, 0);
  PolarState p = polar_of(cfg, WeightState::balanced(ws, 0));
  EXPECT_DOUBLE_EQ(p.magnitude, 1.5);
  EXPECT_DOUBLE_EQ(p.angle, kPi);
  p = polar_of(cfg, WeightState::balanced(-ws, 0));
  EXPECT_NEAR(p.angle, 0.0, 1e-15);
  Vec orth(3);
  orth << 2, 0, 0;
  p = polar_of(cfg, WeightState::balanced(orth, 0));
  EXPECT_DOUBLE_EQ(p.magnitude, 2.0);
  EXPECT_NEAR(p.angle, kPi / 2, 1e-15);
}
