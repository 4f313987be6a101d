#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "expsplit/error.hpp"
#include "expsplit/grid.hpp"
#include "expsplit/problems.hpp"
#include "oracles.hpp"

using namespace expsplit;

TEST(Grid, Coordinates) {
  const Grid g(3, 5);
  EXPECT_DOUBLE_EQ(g.dx(), 0.25);
  EXPECT_DOUBLE_EQ(g.dy(), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(g.x(0), 0.25);
  EXPECT_DOUBLE_EQ(g.y(4), 5.0 / 6.0);
  EXPECT_EQ(g.size(), 15u);
  EXPECT_EQ(g.index(2, 1), 5u);
  EXPECT_THROW(Grid(0, 3), Error);
}

TEST(GridFunction, RejectsBadInput) {
  const Grid g(2, 2);
  EXPECT_THROW(GridFunction(g, std::vector<double>(3, 0.0)), Error);
  EXPECT_THROW(GridFunction(g, {0.0, NAN, 0.0, 0.0}), Error);
  EXPECT_THROW(GridFunction(g, {0.0, INFINITY, 0.0, 0.0}), Error);
  GridFunction u(g);
  EXPECT_THROW(u += GridFunction(Grid(2, 3)), Error);
}

TEST(GridFunction, Arithmetic) {
  const Grid g(2, 1);
  GridFunction u(g, {1.0, 2.0});
  const GridFunction v(g, {3.0, -1.0});
  EXPECT_EQ((u + v).vector(), (std::vector<double>{4.0, 1.0}));
  EXPECT_EQ((u - v).vector(), (std::vector<double>{-2.0, 3.0}));
  EXPECT_EQ((2.0 * u).vector(), (std::vector<double>{2.0, 4.0}));
  u.axpy(0.5, v);
  EXPECT_EQ(u.vector(), (std::vector<double>{2.5, 1.5}));
  EXPECT_DOUBLE_EQ(u.max_abs(), 2.5);
}

TEST(LineOperator, ConstantStencil) {
  const auto fam = build_line_operator(CoefficientField::constant(1.0, 1.0), Grid::square(3), Direction::X);
  ASSERT_EQ(fam.line_count(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::MatrixXd want =
        16.0 * (Eigen::MatrixXd(3, 3) << -2, 1, 0, 1, -2, 1, 0, 1, -2).finished();
    EXPECT_EQ(fam.line(k).to_dense(), want);
  }
}

TEST(LineOperator, SingleNodeLine) {
  const Grid g(1, 4);
  const auto fam = build_line_operator(CoefficientField::constant(1.0, 1.0), g, Direction::X);
  EXPECT_EQ(fam.line_count(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    ASSERT_EQ(fam.line(k).size(), 1u);
    EXPECT_DOUBLE_EQ(fam.line(k).diag[0], -2.0 / (g.dx() * g.dx()));
  }
}

TEST(LineOperator, MatchesDirectStencilEvaluation) {
  const auto c = example_coefficients();
  for (Grid g : {Grid::square(3), Grid(4, 6)}) {
    for (Direction dir : {Direction::X, Direction::Y}) {
      const auto fam = build_line_operator(c, g, dir);
      const Eigen::MatrixXd want = oracle::stencil_matrix(c, g, dir);
      // scatter the line matrices into the global ordering
      Eigen::MatrixXd got = Eigen::MatrixXd::Zero(want.rows(), want.cols());
      for (std::size_t k = 0; k < fam.line_count(); ++k) {
        const Eigen::MatrixXd m = fam.line(k).to_dense();
        for (Eigen::Index p = 0; p < m.rows(); ++p)
          for (Eigen::Index q = 0; q < m.cols(); ++q) {
            const int kk = static_cast<int>(k);
            const auto r = dir == Direction::X ? g.index(static_cast<int>(p), kk) : g.index(kk, static_cast<int>(p));
            const auto s = dir == Direction::X ? g.index(static_cast<int>(q), kk) : g.index(kk, static_cast<int>(q));
            got(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = m(p, q);
          }
      }
      EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12 * want.cwiseAbs().maxCoeff());
    }
  }
}

TEST(LineOperator, NonPositiveCoefficient) {
  const CoefficientField bad([](double x, double) { return x - 0.5; }, [](double, double) { return 1.0; });
  try {
    build_line_operator(bad, Grid::square(4), Direction::X);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveCoefficient);
  }
  // the y family of the same field is fine
  EXPECT_NO_THROW(build_line_operator(bad, Grid::square(4), Direction::Y));
}

TEST(LineOperator, NegativeDefiniteAndOrthogonal) {
  for (int n = 1; n <= 16; n += 3) {
    const Discretization disc(example_coefficients(), Grid::square(n));
    for (const auto* fam : {&disc.a(), &disc.b()}) {
      for (std::size_t k = 0; k < fam->line_count(); ++k) {
        const auto& ed = fam->line_decomposition(k);
        EXPECT_LT(ed.eigenvalues.maxCoeff(), 0.0);
        const auto& q = ed.eigenvectors;
        EXPECT_LE((q * q.transpose() - Eigen::MatrixXd::Identity(q.rows(), q.rows())).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
    EXPECT_LT(disc.full_operator().decomposition().eigenvalues.maxCoeff(), 0.0);
  }
}

TEST(ApplySplit, ZeroAndEigenfunction) {
  const Grid g = Grid::square(15);
  const auto fam = build_line_operator(CoefficientField::constant(1.0, 1.0), g, Direction::X);
  EXPECT_EQ(apply_split_operator(fam, GridFunction(g)).max_abs(), 0.0);
  for (int k : {1, 4, 15}) {
    for (int m : {2, 7}) {
      const auto u = GridFunction::sample(g, [&](double x, double y) {
        return std::sin(k * M_PI * x) * std::sin(m * M_PI * y);
      });
      const double s = std::sin(k * M_PI * g.dx() / 2);
      const double lambda = -(4.0 / (g.dx() * g.dx())) * s * s;
      const auto au = apply_split_operator(fam, u);
      EXPECT_LE((au.eigen() - lambda * u.eigen()).cwiseAbs().maxCoeff(), 1e-10 * std::abs(lambda));
    }
  }
}

TEST(ApplySplit, MatchesDenseProduct) {
  std::mt19937_64 rng(1);
  for (int nx = 1; nx <= 8; ++nx) {
    for (int ny = 1; ny <= 8; ny += 3) {
      const Discretization disc(example_coefficients(), Grid(nx, ny));
      const auto u = oracle::random_function(disc.grid(), rng);
      for (Direction dir : {Direction::X, Direction::Y}) {
        const auto& fam = dir == Direction::X ? disc.a() : disc.b();
        const Eigen::VectorXd want = oracle::stencil_matrix(example_coefficients(), disc.grid(), dir) * u.eigen();
        const auto got = apply_split_operator(fam, u);
        EXPECT_LE((got.eigen() - want).cwiseAbs().maxCoeff(), 1e-13 * want.cwiseAbs().maxCoeff() + 1e-13 * u.eigen().norm());
      }
    }
  }
}

TEST(ApplySplit, GridMismatch) {
  const auto fam = build_line_operator(example_coefficients(), Grid::square(3), Direction::X);
  try {
    apply_split_operator(fam, GridFunction(Grid::square(4)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Assemble, FivePointLaplacian) {
  const Discretization disc(CoefficientField::constant(1.0, 1.0), Grid::square(3));
  const auto& l = disc.full_operator().matrix();
  const double s = 16.0;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      const int r = j * 3 + i;
      for (int c = 0; c < 9; ++c) {
        const int ci = c % 3, cj = c / 3;
        double want = 0.0;
        if (c == r) want = -4.0 * s;
        else if (std::abs(ci - i) + std::abs(cj - j) == 1) want = s;
        EXPECT_EQ(l(r, c), want);
      }
    }
}

TEST(Assemble, ConstantCoefficientIsScaledLaplacian) {
  const Discretization one(CoefficientField::constant(1.0, 1.0), Grid::square(5));
  const Discretization three(CoefficientField::constant(3.0, 3.0), Grid::square(5));
  EXPECT_EQ(three.full_operator().matrix(), 3.0 * one.full_operator().matrix());
}

TEST(Assemble, SymmetricAndConsistent) {
  std::mt19937_64 rng(2);
  const Discretization disc(example_coefficients(), Grid::square(4));
  const auto& l = disc.full_operator().matrix();
  EXPECT_EQ((l - l.transpose()).cwiseAbs().maxCoeff(), 0.0);
  for (int n : {2, 5, 7}) {
    const Discretization d(example_coefficients(), Grid(n, n + 1));
    const auto u = oracle::random_function(d.grid(), rng);
    const Eigen::VectorXd lu = d.full_operator().matrix() * u.eigen();
    const auto split = apply_split_operator(d.a(), u) + apply_split_operator(d.b(), u);
    EXPECT_LE((lu - split.eigen()).norm(), 1e-13 * lu.norm());
  }
}

TEST(Assemble, RequiresXYPair) {
  const Grid g = Grid::square(3);
  const auto a = build_line_operator(example_coefficients(), g, Direction::X);
  const auto b = build_line_operator(example_coefficients(), Grid::square(4), Direction::Y);
  EXPECT_THROW(assemble_full_operator(a, b), Error);
  EXPECT_THROW(assemble_full_operator(a, a), Error);
}

TEST(Discretization, SecondOrderConsistency) {
  std::vector<double> logdx, logerr;
  for (int n : {7, 15, 31, 63, 127}) {
    const Discretization disc(CoefficientField::constant(1.0, 1.0), Grid::square(n));
    const auto w = GridFunction::sample(disc.grid(), [](double x, double y) {
      return std::sin(M_PI * x) * std::sin(M_PI * y);
    });
    const auto lw = apply_split_operator(disc.a(), w) + apply_split_operator(disc.b(), w);
    const Eigen::VectorXd err = lw.eigen() + 2.0 * M_PI * M_PI * w.eigen();
    logdx.push_back(std::log(disc.grid().dx()));
    logerr.push_back(std::log(err.cwiseAbs().maxCoeff()));
  }
  const double n = static_cast<double>(logdx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < logdx.size(); ++i) { mx += logdx[i] / n; my += logerr[i] / n; }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < logdx.size(); ++i) {
    sxy += (logdx[i] - mx) * (logerr[i] - my);
    sxx += (logdx[i] - mx) * (logdx[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, 2.0, 0.1);
}

TEST(BoundaryCoupling, ZeroTrace) {
  const Discretization disc(example_coefficients(), Grid::square(5));
  const auto c = boundary_coupling_vector(disc.a(), disc.b(), [](double, double) { return 0.0; });
  EXPECT_EQ(c.max_abs(), 0.0);
}

TEST(BoundaryCoupling, ExtendedGridOracle) {
  using Field = std::function<double(double, double)>;
  const Field one = [](double, double) { return 1.0; };
  const Field poly = [](double x, double y) { return x * x - y * y + 3 * x * y + 1; };
  for (const auto& coeffs : {CoefficientField::constant(1.0, 1.0), example_coefficients()}) {
    for (Grid g : {Grid::square(3), Grid(4, 2), Grid(1, 1), Grid(5, 1)}) {
      const Discretization disc(coeffs, g);
      for (const Field& f : {one, poly}) {
        // L_ext f restricted = L f_interior + coupling(f)
        const auto fi = GridFunction::sample(g, f);
        const auto got = apply_split_operator(disc.a(), fi) + apply_split_operator(disc.b(), fi) +
                         boundary_coupling_vector(disc.a(), disc.b(), f);
        const Eigen::VectorXd want = oracle::extended_apply(coeffs, g, f);
        EXPECT_LE((got.eigen() - want).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + want.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST(BoundaryCoupling, ConstantTraceCorners) {
  const Discretization disc(CoefficientField::constant(1.0, 1.0), Grid::square(3));
  const auto c = boundary_coupling_vector(disc.a(), disc.b(), [](double, double) { return 1.0; });
  EXPECT_DOUBLE_EQ(c(0, 0), 2.0 * 16.0);
  EXPECT_DOUBLE_EQ(c(1, 0), 16.0);
  EXPECT_DOUBLE_EQ(c(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(c(2, 2), 2.0 * 16.0);
}

TEST(BoundaryCoupling, OneDimensionalVector) {
  // A single interior row with b chosen so the y coupling vanishes for a trace that is zero on y = 0, 1.
  const Grid g(6, 1);
  const Discretization disc(CoefficientField::constant(1.0, 1.0), g);
  const double alpha = 2.5, beta = -1.5;
  const auto c = boundary_coupling_vector(disc.a(), disc.b(), [&](double x, double y) {
    if (y == 0.0 || y == 1.0) return 0.0;
    return x == 0.0 ? alpha : (x == 1.0 ? beta : 0.0);
  });
  const double s = 1.0 / (g.dx() * g.dx());
  for (int i = 0; i < 6; ++i) {
    const double want = i == 0 ? s * alpha : (i == 5 ? s * beta : 0.0);
    EXPECT_DOUBLE_EQ(c(i, 0), want);
  }
}
