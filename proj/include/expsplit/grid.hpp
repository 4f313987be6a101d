#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "expsplit/linalg.hpp"

namespace expsplit {

/// Uniform grid of interior nodes on the unit square. Node (i, j) sits at
/// ((i+1) dx, (j+1) dy); boundary values are not stored.
class Grid {
 public:
  Grid(int nx, int ny);
  static Grid square(int n) { return Grid(n, n); }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double dx() const noexcept { return 1.0 / (nx_ + 1); }
  double dy() const noexcept { return 1.0 / (ny_ + 1); }
  double x(int i) const noexcept { return (i + 1) * dx(); }
  double y(int j) const noexcept { return (j + 1) * dy(); }

  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  /// Row-major: j outer, i inner.
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }

  bool operator==(const Grid&) const = default;

 private:
  int nx_;
  int ny_;
};

void check_same_grid(const Grid& expected, const Grid& actual, const char* what);

using ScalarField = std::function<double(double x, double y)>;

/// Values of a scalar field on the interior nodes of a grid.
class GridFunction {
 public:
  explicit GridFunction(Grid grid);
  /// Throws InvalidArgument on a length mismatch or non-finite entries.
  GridFunction(Grid grid, std::vector<double> values);

  static GridFunction sample(const Grid& grid, const ScalarField& f);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }

  Eigen::Map<const Eigen::VectorXd> eigen() const noexcept {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }
  Eigen::Map<Eigen::VectorXd> eigen() noexcept {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s) noexcept;
  /// this += alpha * x
  GridFunction& axpy(double alpha, const GridFunction& x);

  friend GridFunction operator+(GridFunction lhs, const GridFunction& rhs) { return lhs += rhs; }
  friend GridFunction operator-(GridFunction lhs, const GridFunction& rhs) { return lhs -= rhs; }
  friend GridFunction operator*(double s, GridFunction u) { return u *= s; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Diffusion coefficients a(x,y) (x direction) and b(x,y) (y direction).
class CoefficientField {
 public:
  CoefficientField(ScalarField a, ScalarField b);
  static CoefficientField constant(double a, double b);

  double a(double x, double y) const { return a_(x, y); }
  double b(double x, double y) const { return b_(x, y); }

 private:
  ScalarField a_;
  ScalarField b_;
};

enum class Direction { X, Y };

/// exp(t M_line) for every line of a family, stored densely.
class LinePropagator {
 public:
  LinePropagator(Grid grid, Direction direction, std::vector<Eigen::MatrixXd> per_line);

  Direction direction() const noexcept { return direction_; }
  const Grid& grid() const noexcept { return grid_; }

  /// In-place application to one grid function.
  void apply(GridFunction& u) const;
  /// In-place application to every column of `block` (each column a grid function).
  void apply_columns(Eigen::MatrixXd& block) const;

 private:
  Grid grid_;
  Direction direction_;
  std::vector<Eigen::MatrixXd> per_line_;
};

/// The split operator A (direction X) or B (direction Y): one symmetric
/// tridiagonal matrix per grid line. Line k of an X family is the row j = k,
/// of a Y family the column i = k.
class LineOperatorFamily {
 public:
  /// `half_node` holds, per line, the n+1 coefficient samples between
  /// consecutive nodes including the two boundary half-cells.
  LineOperatorFamily(Grid grid, Direction direction, std::vector<std::vector<double>> half_node);

  const Grid& grid() const noexcept { return grid_; }
  Direction direction() const noexcept { return direction_; }
  std::size_t line_count() const noexcept { return lines_.size(); }
  int line_length() const noexcept { return direction_ == Direction::X ? grid_.nx() : grid_.ny(); }
  double spacing() const noexcept { return direction_ == Direction::X ? grid_.dx() : grid_.dy(); }

  const SymTridiag& line(std::size_t k) const { return lines_.at(k); }
  std::span<const double> half_node_coefficients(std::size_t k) const { return half_node_.at(k); }

  /// Eigendecompositions of all lines, computed once on first use.
  const EigenDecomposition& line_decomposition(std::size_t k) const;

  LinePropagator propagator(double t) const;

 private:
  struct Cache {
    std::once_flag once;
    std::vector<EigenDecomposition> decomps;
  };

  Grid grid_;
  Direction direction_;
  std::vector<std::vector<double>> half_node_;
  std::vector<SymTridiag> lines_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Symmetric second-order stencil (1/dx^2)[c_{i-1/2}, -(c_{i-1/2}+c_{i+1/2}), c_{i+1/2}]
/// with coefficients sampled at half nodes and homogeneous Dirichlet values
/// eliminated. Throws NonPositiveCoefficient on any sample <= 0.
LineOperatorFamily build_line_operator(const CoefficientField& coeff, const Grid& grid,
                                       Direction direction);

GridFunction apply_split_operator(const LineOperatorFamily& family, const GridFunction& u);

/// L = A + B as a dense symmetric matrix.
DiscreteOperator assemble_full_operator(const LineOperatorFamily& a_family,
                                        const LineOperatorFamily& b_family);

/// Stencil contributions of boundary values f on ∂Ω to the interior nodes.
GridFunction boundary_coupling_vector(const LineOperatorFamily& a_family,
                                      const LineOperatorFamily& b_family,
                                      const ScalarField& boundary_trace);

/// Grid, coefficients and both split operators; the assembled L is built on
/// first request and shared between copies.
class Discretization {
 public:
  Discretization(CoefficientField coefficients, Grid grid);

  const Grid& grid() const noexcept { return grid_; }
  const CoefficientField& coefficients() const noexcept { return coefficients_; }
  const LineOperatorFamily& a() const noexcept { return a_; }
  const LineOperatorFamily& b() const noexcept { return b_; }
  const DiscreteOperator& full_operator() const;

 private:
  struct Cache {
    std::once_flag once;
    std::unique_ptr<DiscreteOperator> full;
  };

  CoefficientField coefficients_;
  Grid grid_;
  LineOperatorFamily a_;
  LineOperatorFamily b_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace expsplit
