#include "expsplit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "expsplit/error.hpp"

namespace expsplit {

Grid::Grid(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) {
    throw Error(ErrorCode::InvalidArgument, "Grid: need at least one interior node per direction");
  }
}

void check_same_grid(const Grid& expected, const Grid& actual, const char* what) {
  if (!(expected == actual)) {
    throw Error(ErrorCode::GridMismatch,
                std::string(what) + ": grid " + std::to_string(actual.nx()) + "x" +
                    std::to_string(actual.ny()) + " does not match " +
                    std::to_string(expected.nx()) + "x" + std::to_string(expected.ny()));
  }
}

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::InvalidArgument, "GridFunction: expected " +
                                                std::to_string(grid_.size()) + " values, got " +
                                                std::to_string(values_.size()));
  }
  if (!all_finite()) throw Error(ErrorCode::InvalidArgument, "GridFunction: non-finite value");
}

GridFunction GridFunction::sample(const Grid& grid, const ScalarField& f) {
  std::vector<double> values(grid.size());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) values[grid.index(i, j)] = f(grid.x(i), grid.y(j));
  }
  return GridFunction(grid, std::move(values));
}

bool GridFunction::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridFunction::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  check_same_grid(grid_, other.grid_, "GridFunction::operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  check_same_grid(grid_, other.grid_, "GridFunction::operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction& GridFunction::axpy(double alpha, const GridFunction& x) {
  check_same_grid(grid_, x.grid_, "GridFunction::axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += alpha * x.values_[k];
  return *this;
}

CoefficientField::CoefficientField(ScalarField a, ScalarField b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (!a_ || !b_) throw Error(ErrorCode::InvalidArgument, "CoefficientField: empty evaluator");
}

CoefficientField CoefficientField::constant(double a, double b) {
  return CoefficientField([a](double, double) { return a; }, [b](double, double) { return b; });
}

LinePropagator::LinePropagator(Grid grid, Direction direction, std::vector<Eigen::MatrixXd> per_line)
    : grid_(grid), direction_(direction), per_line_(std::move(per_line)) {}

void LinePropagator::apply(GridFunction& u) const {
  check_same_grid(grid_, u.grid(), "LinePropagator::apply");
  const Eigen::Index nx = grid_.nx();
  const Eigen::Index ny = grid_.ny();
  // Row-major view: row j is the x-line j, column i the y-line i.
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> field(
      u.values().data(), ny, nx);
  Eigen::VectorXd tmp;
  if (direction_ == Direction::X) {
    for (Eigen::Index j = 0; j < ny; ++j) {
      tmp.noalias() = per_line_[static_cast<std::size_t>(j)] * field.row(j).transpose();
      field.row(j) = tmp.transpose();
    }
  } else {
    for (Eigen::Index i = 0; i < nx; ++i) {
      tmp.noalias() = per_line_[static_cast<std::size_t>(i)] * field.col(i);
      field.col(i) = tmp;
    }
  }
}

void LinePropagator::apply_columns(Eigen::MatrixXd& block) const {
  if (static_cast<std::size_t>(block.rows()) != grid_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "LinePropagator::apply_columns: wrong row count");
  }
  const Eigen::Index nx = grid_.nx();
  const Eigen::Index ny = grid_.ny();
  const Eigen::Index cols = block.cols();
  Eigen::MatrixXd tmp;
  if (direction_ == Direction::X) {
    for (Eigen::Index j = 0; j < ny; ++j) {
      auto rows = block.middleRows(j * nx, nx);
      tmp.noalias() = per_line_[static_cast<std::size_t>(j)] * rows;
      rows = tmp;
    }
  } else {
    using Strided = Eigen::Map<Eigen::MatrixXd, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
    for (Eigen::Index i = 0; i < nx; ++i) {
      Strided rows(block.data() + i, ny, cols,
                   Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(block.rows(), nx));
      tmp.noalias() = per_line_[static_cast<std::size_t>(i)] * rows;
      rows = tmp;
    }
  }
}

LineOperatorFamily::LineOperatorFamily(Grid grid, Direction direction,
                                       std::vector<std::vector<double>> half_node)
    : grid_(grid), direction_(direction), half_node_(std::move(half_node)) {
  const std::size_t expected_lines =
      static_cast<std::size_t>(direction_ == Direction::X ? grid_.ny() : grid_.nx());
  const auto n = static_cast<std::size_t>(line_length());
  if (half_node_.size() != expected_lines) {
    throw Error(ErrorCode::InvalidArgument, "LineOperatorFamily: wrong number of lines");
  }
  const double inv_h2 = 1.0 / (spacing() * spacing());
  lines_.reserve(expected_lines);
  for (const auto& c : half_node_) {
    if (c.size() != n + 1) {
      throw Error(ErrorCode::InvalidArgument, "LineOperatorFamily: need n+1 half-node samples");
    }
    for (double v : c) {
      if (!(v > 0.0)) {
        throw Error(ErrorCode::NonPositiveCoefficient,
                    "coefficient sample " + std::to_string(v) + " is not positive");
      }
    }
    SymTridiag m;
    m.diag.resize(n);
    m.offdiag.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      m.diag[i] = -(c[i] + c[i + 1]) * inv_h2;
      if (i + 1 < n) m.offdiag[i] = c[i + 1] * inv_h2;
    }
    lines_.push_back(std::move(m));
  }
}

const EigenDecomposition& LineOperatorFamily::line_decomposition(std::size_t k) const {
  std::call_once(cache_->once, [this] {
    std::vector<EigenDecomposition> decomps;
    decomps.reserve(lines_.size());
    for (const auto& m : lines_) decomps.push_back(sym_tridiag_eigen(m));
    cache_->decomps = std::move(decomps);
  });
  return cache_->decomps.at(k);
}

LinePropagator LineOperatorFamily::propagator(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "propagator: t must be >= 0");
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(lines_.size());
  for (std::size_t k = 0; k < lines_.size(); ++k) {
    const auto& ed = line_decomposition(k);
    const Eigen::VectorXd w = (t * ed.eigenvalues).array().exp();
    mats.push_back(ed.eigenvectors * w.asDiagonal() * ed.eigenvectors.transpose());
  }
  return LinePropagator(grid_, direction_, std::move(mats));
}

LineOperatorFamily build_line_operator(const CoefficientField& coeff, const Grid& grid,
                                       Direction direction) {
  std::vector<std::vector<double>> half_node;
  if (direction == Direction::X) {
    const double dx = grid.dx();
    half_node.resize(static_cast<std::size_t>(grid.ny()));
    for (int j = 0; j < grid.ny(); ++j) {
      auto& c = half_node[static_cast<std::size_t>(j)];
      c.resize(static_cast<std::size_t>(grid.nx()) + 1);
      for (int k = 0; k <= grid.nx(); ++k) c[static_cast<std::size_t>(k)] = coeff.a((k + 0.5) * dx, grid.y(j));
    }
  } else {
    const double dy = grid.dy();
    half_node.resize(static_cast<std::size_t>(grid.nx()));
    for (int i = 0; i < grid.nx(); ++i) {
      auto& c = half_node[static_cast<std::size_t>(i)];
      c.resize(static_cast<std::size_t>(grid.ny()) + 1);
      for (int k = 0; k <= grid.ny(); ++k) c[static_cast<std::size_t>(k)] = coeff.b(grid.x(i), (k + 0.5) * dy);
    }
  }
  return LineOperatorFamily(grid, direction, std::move(half_node));
}

GridFunction apply_split_operator(const LineOperatorFamily& family, const GridFunction& u) {
  const Grid& grid = family.grid();
  check_same_grid(grid, u.grid(), "apply_split_operator");
  GridFunction out(grid);
  const int n = family.line_length();
  // Node m on line k lives at flat index base + m*stride.
  const bool along_x = family.direction() == Direction::X;
  const std::size_t stride = along_x ? 1 : static_cast<std::size_t>(grid.nx());
  const auto in = u.values();
  auto res = out.values();
  for (std::size_t k = 0; k < family.line_count(); ++k) {
    const std::size_t base = along_x ? k * static_cast<std::size_t>(grid.nx()) : k;
    const auto& m = family.line(k);
    for (int p = 0; p < n; ++p) {
      const auto pm = static_cast<std::size_t>(p);
      double acc = m.diag[pm] * in[base + pm * stride];
      if (p > 0) acc += m.offdiag[pm - 1] * in[base + (pm - 1) * stride];
      if (p + 1 < n) acc += m.offdiag[pm] * in[base + (pm + 1) * stride];
      res[base + pm * stride] = acc;
    }
  }
  return out;
}

DiscreteOperator assemble_full_operator(const LineOperatorFamily& a_family,
                                        const LineOperatorFamily& b_family) {
  const Grid& grid = a_family.grid();
  check_same_grid(grid, b_family.grid(), "assemble_full_operator");
  if (a_family.direction() != Direction::X || b_family.direction() != Direction::Y) {
    throw Error(ErrorCode::InvalidArgument, "assemble_full_operator: expected (X, Y) families");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const LineOperatorFamily* fam : {&a_family, &b_family}) {
    const bool along_x = fam->direction() == Direction::X;
    const Eigen::Index stride = along_x ? 1 : grid.nx();
    for (std::size_t k = 0; k < fam->line_count(); ++k) {
      const Eigen::Index base = along_x ? static_cast<Eigen::Index>(k) * grid.nx() : static_cast<Eigen::Index>(k);
      const auto& line = fam->line(k);
      for (int p = 0; p < fam->line_length(); ++p) {
        const Eigen::Index r = base + p * stride;
        m(r, r) += line.diag[static_cast<std::size_t>(p)];
        if (p + 1 < fam->line_length()) {
          const double off = line.offdiag[static_cast<std::size_t>(p)];
          m(r, r + stride) += off;
          m(r + stride, r) += off;
        }
      }
    }
  }
  return DiscreteOperator(std::move(m));
}

GridFunction boundary_coupling_vector(const LineOperatorFamily& a_family,
                                      const LineOperatorFamily& b_family,
                                      const ScalarField& boundary_trace) {
  const Grid& grid = a_family.grid();
  check_same_grid(grid, b_family.grid(), "boundary_coupling_vector");
  GridFunction out(grid);
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  const double inv_dy2 = 1.0 / (grid.dy() * grid.dy());
  for (int j = 0; j < ny; ++j) {
    const auto c = a_family.half_node_coefficients(static_cast<std::size_t>(j));
    out(0, j) += c.front() * inv_dx2 * boundary_trace(0.0, grid.y(j));
    out(nx - 1, j) += c.back() * inv_dx2 * boundary_trace(1.0, grid.y(j));
  }
  for (int i = 0; i < nx; ++i) {
    const auto c = b_family.half_node_coefficients(static_cast<std::size_t>(i));
    out(i, 0) += c.front() * inv_dy2 * boundary_trace(grid.x(i), 0.0);
    out(i, ny - 1) += c.back() * inv_dy2 * boundary_trace(grid.x(i), 1.0);
  }
  return out;
}

Discretization::Discretization(CoefficientField coefficients, Grid grid)
    : coefficients_(std::move(coefficients)),
      grid_(grid),
      a_(build_line_operator(coefficients_, grid_, Direction::X)),
      b_(build_line_operator(coefficients_, grid_, Direction::Y)) {}

const DiscreteOperator& Discretization::full_operator() const {
  std::call_once(cache_->once, [this] {
    cache_->full = std::make_unique<DiscreteOperator>(assemble_full_operator(a_, b_));
  });
  return *cache_->full;
}

}  // namespace expsplit
