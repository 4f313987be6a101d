#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "expsplit/error.hpp"
#include "expsplit/norms.hpp"
#include "expsplit/problems.hpp"
#include "oracles.hpp"

using namespace expsplit;

TEST(NormKind, Parse) {
  EXPECT_EQ(NormKind::parse("l2").tag, NormKind::Tag::L2);
  EXPECT_EQ(NormKind::parse("dual").tag, NormKind::Tag::Dual);
  const auto f = NormKind::parse("frac:0.5");
  EXPECT_EQ(f.tag, NormKind::Tag::Fractional);
  EXPECT_DOUBLE_EQ(f.gamma, 0.5);
  EXPECT_EQ(f.name(), "frac:0.5");
  EXPECT_THROW(NormKind::parse("frac:2.5"), Error);
  EXPECT_THROW(NormKind::parse("frac:abc"), Error);
  EXPECT_THROW(NormKind::parse("frac:0.5x"), Error);
  EXPECT_THROW(NormKind::parse("h1"), Error);
}

TEST(DiscreteL2, SimpleValues) {
  EXPECT_EQ(discrete_l2(GridFunction(Grid::square(5))), 0.0);
  for (int n : {1, 4, 9}) {
    const Grid g = Grid::square(n);
    const GridFunction one(g, std::vector<double>(g.size(), 1.0));
    EXPECT_NEAR(discrete_l2(one), n / (n + 1.0), 1e-14);
  }
  const Grid g = Grid::square(63);
  const auto s = GridFunction::sample(g, [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
  EXPECT_NEAR(discrete_l2(s), 0.5, 2e-2);
}

TEST(DualNorm, Identities) {
  const Discretization disc(example_coefficients(), Grid::square(8));
  const auto& op = disc.full_operator();
  EXPECT_EQ(dual_norm(op, GridFunction(disc.grid())), 0.0);
  std::mt19937_64 rng(31);
  const auto v = oracle::random_function(disc.grid(), rng);
  const GridFunction lv(disc.grid(), op.apply(v.values()));
  // CG path (no decomposition yet)
  ASSERT_FALSE(op.has_decomposition());
  const double cg = dual_norm(op, lv);
  EXPECT_NEAR(cg, discrete_l2(v), 1e-9 * discrete_l2(v));
  op.decomposition();
  const double spectral = dual_norm(op, lv);
  EXPECT_NEAR(spectral, discrete_l2(v), 1e-9 * discrete_l2(v));
}

TEST(DualNorm, EigenvectorScaling) {
  const Discretization disc(CoefficientField::constant(1.0, 1.0), Grid::square(6));
  const auto& ed = disc.full_operator().decomposition();
  for (Eigen::Index k : {0, 7, 35}) {
    std::vector<double> e(ed.eigenvectors.col(k).data(), ed.eigenvectors.col(k).data() + 36);
    const GridFunction u(disc.grid(), e);
    EXPECT_NEAR(dual_norm(disc.full_operator(), u), discrete_l2(u) / std::abs(ed.eigenvalues[k]), 1e-12);
  }
}

TEST(DualNorm, BoundedByInverseNorm) {
  const Discretization disc(example_coefficients(), Grid::square(7));
  const auto& ed = disc.full_operator().decomposition();
  const double inv = 1.0 / std::abs(ed.eigenvalues.maxCoeff());
  std::mt19937_64 rng(32);
  for (int i = 0; i < 50; ++i) {
    const auto u = oracle::random_function(disc.grid(), rng);
    EXPECT_LE(dual_norm(disc.full_operator(), u), inv * discrete_l2(u) * (1 + 1e-12));
  }
}

TEST(Fractional, Powers) {
  const Discretization disc(example_coefficients(), Grid::square(6));
  const auto& op = disc.full_operator();
  std::mt19937_64 rng(33);
  const auto u = oracle::random_function(disc.grid(), rng);
  try {
    fractional_apply(op, 0.5, u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DecompositionMissing);
  }
  op.decomposition();
  EXPECT_LE((fractional_apply(op, 0.0, u) - u).max_abs(), 1e-15);
  const Eigen::VectorXd minus_lu = -(op.matrix() * u.eigen());
  EXPECT_LE(oracle::max_rel(fractional_apply(op, 1.0, u).eigen(), minus_lu), 1e-10);
  const auto half = fractional_apply(op, 0.5, fractional_apply(op, 0.5, u));
  EXPECT_LE(oracle::max_rel(half.eigen(), minus_lu), 1e-9);
}

TEST(Fractional, MomentInequality) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int n : {3, 9, 16}) {
    const Discretization disc(example_coefficients(), Grid::square(n));
    const auto& op = disc.full_operator();
    op.decomposition();
    for (int i = 0; i < 10; ++i) {
      const auto u = oracle::random_function(disc.grid(), rng);
      const double g = unit(rng);
      const double lhs = discrete_l2(fractional_apply(op, g, u));
      const double rhs = std::pow(discrete_l2(u), 1 - g) * std::pow(discrete_l2(fractional_apply(op, 1.0, u)), g);
      EXPECT_LE(lhs, rhs * (1 + 1e-12));
    }
  }
}

TEST(Measure, DispatchesOnKind) {
  const Discretization disc(example_coefficients(), Grid::square(5));
  std::mt19937_64 rng(35);
  const auto u = oracle::random_function(disc.grid(), rng);
  const auto& op = disc.full_operator();
  EXPECT_DOUBLE_EQ(measure(NormKind::l2(), op, u), discrete_l2(u));
  EXPECT_DOUBLE_EQ(measure(NormKind::dual(), op, u), dual_norm(op, u));
  EXPECT_NEAR(measure(NormKind::fractional(1.0), op, u), discrete_l2(GridFunction(disc.grid(), op.apply(u.values()))), 1e-10 * measure(NormKind::fractional(1.0), op, u));
}

TEST(Smoothing, AlphaZeroIsContraction) {
  const Discretization disc(example_coefficients(), Grid::square(9));
  for (Scheme s : {Scheme::Lie, Scheme::Strang}) {
    for (int steps : {8, 32}) {
      for (const auto& x : smoothing_probe(disc, 0.0, s, 1.0 / steps, steps)) EXPECT_LE(x.estimate, 1.0 + 1e-8);
    }
  }
}

TEST(Smoothing, FirstStepEnvelope) {
  const Discretization disc(example_coefficients(), Grid::square(15));
  const double alpha = 0.5;
  for (double h : {0.01, 0.1}) {
    for (Scheme s : {Scheme::Lie, Scheme::Strang}) {
      const auto x = smoothing_probe(disc, alpha, s, h, 1);
      EXPECT_LE(x[0].estimate, std::pow(alpha / (std::exp(1.0) * h), alpha) * 1.5);
    }
  }
}

TEST(Smoothing, UniformInStepSize) {
  // t^a ||(-L)^a S^n|| stays under the scalar envelope sup_z |z|^a e^{-z} (slack 1.5) at every h;
  // it only levels off once h |lambda_min| < 1, so the ratio check starts at T/64.
  const Discretization disc(example_coefficients(), Grid::square(11));
  const double alpha = 0.5;
  const double envelope = std::pow(alpha / std::exp(1.0), alpha) * 1.5;
  for (Scheme s : {Scheme::Lie, Scheme::Strang}) {
    double prev = 0.0;
    for (int steps : {8, 16, 32, 64, 128, 256}) {
      double m = 0.0;
      for (const auto& x : smoothing_probe(disc, alpha, s, 1.0 / steps, steps)) {
        m = std::max(m, std::pow(x.time, alpha) * x.estimate);
      }
      EXPECT_LE(m, envelope) << steps;
      if (steps > 64) EXPECT_LE(m / prev, 1.1) << steps;
      prev = m;
    }
  }
}

TEST(Smoothing, RejectsBadArguments) {
  const Discretization disc(example_coefficients(), Grid::square(3));
  EXPECT_THROW(smoothing_probe(disc, 1.0, Scheme::Lie, 0.1, 3), Error);
  EXPECT_THROW(smoothing_probe(disc, 0.5, Scheme::StrangB, 0.1, 3), Error);
  EXPECT_THROW(smoothing_probe(disc, 0.5, Scheme::Lie, 0.1, 0), Error);
}
