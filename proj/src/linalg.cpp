#include "expsplit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "expsplit/error.hpp"

namespace expsplit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::MissingLiftDerivative: return "MissingLiftDerivative";
    case ErrorCode::DecompositionMissing: return "DecompositionMissing";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ReferenceInconsistent: return "ReferenceInconsistent";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace detail {

void check_dimension(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected length " +
                                                  std::to_string(expected) + ", got " +
                                                  std::to_string(actual));
  }
}

}  // namespace detail

Eigen::MatrixXd SymTridiag::to_dense() const {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      m(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
      m(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
  }
  return m;
}

namespace {

void sort_ascending(EigenDecomposition& ed) {
  const auto n = ed.eigenvalues.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return ed.eigenvalues[a] < ed.eigenvalues[b];
  });
  if (std::is_sorted(order.begin(), order.end())) return;
  EigenDecomposition sorted{Eigen::VectorXd(n), Eigen::MatrixXd(ed.eigenvectors.rows(), n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    sorted.eigenvalues[k] = ed.eigenvalues[src];
    sorted.eigenvectors.col(k) = ed.eigenvectors.col(src);
  }
  ed = std::move(sorted);
}

}  // namespace

EigenDecomposition sym_tridiag_eigen(const SymTridiag& m) {
  const std::size_t n = m.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sym_tridiag_eigen: empty matrix");
  if (m.offdiag.size() != n - 1) {
    throw Error(ErrorCode::DimensionMismatch, "sym_tridiag_eigen: offdiag must have n-1 entries");
  }

  const auto ni = static_cast<Eigen::Index>(n);
  std::vector<double> d = m.diag;
  std::vector<double> e(n, 0.0);  // e[i] couples rows i and i+1
  std::copy(m.offdiag.begin(), m.offdiag.end(), e.begin());
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(ni, ni);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t max_sweeps = 50 * n;

  for (std::size_t l = 0; l < n; ++l) {
    std::size_t sweeps = 0;
    std::size_t mm = l;
    do {
      for (mm = l; mm + 1 < n; ++mm) {
        const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(e[mm]) <= eps * dd) break;
      }
      if (mm == l) break;
      if (sweeps++ == max_sweeps) {
        throw Error(ErrorCode::NoConvergence,
                    "sym_tridiag_eigen: eigenvalue " + std::to_string(l) + " did not converge");
      }

      // Wilkinson-type shift from the leading 2x2 block.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t ii = mm; ii-- > l;) {
        double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[mm] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
        const auto i0 = static_cast<Eigen::Index>(ii);
        for (Eigen::Index k = 0; k < ni; ++k) {
          f = z(k, i0 + 1);
          z(k, i0 + 1) = s * z(k, i0) + c * f;
          z(k, i0) = c * z(k, i0) - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[mm] = 0.0;
    } while (mm != l);
  }

  EigenDecomposition out{Eigen::Map<Eigen::VectorXd>(d.data(), ni), std::move(z)};
  sort_ascending(out);
  return out;
}

EigenDecomposition dense_sym_eigen(const Eigen::MatrixXd& m, std::size_t cap) {
  const auto n = static_cast<std::size_t>(m.rows());
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "dense_sym_eigen: matrix is not square");
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "dense_sym_eigen: empty matrix");
  if (n > cap) {
    throw Error(ErrorCode::DimensionCapExceeded, "dense_sym_eigen: dimension " +
                                                     std::to_string(n) + " exceeds cap " +
                                                     std::to_string(cap));
  }
  EigenDecomposition out{Eigen::VectorXd(m.rows()), m};
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', ln, out.eigenvectors.data(),
                                         ln, out.eigenvalues.data());
  if (info != 0) {
    throw Error(ErrorCode::NoConvergence, "dense_sym_eigen: dsyevd info " + std::to_string(info));
  }
  return out;
}

DiscreteOperator::DiscreteOperator(Eigen::MatrixXd matrix, std::size_t eigen_cap)
    : matrix_(std::move(matrix)), eigen_cap_(eigen_cap) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "DiscreteOperator: matrix is not square");
  }
}

std::vector<double> DiscreteOperator::apply(std::span<const double> v) const {
  detail::check_dimension(dimension(), v.size(), "DiscreteOperator::apply");
  std::vector<double> out(v.size());
  const Eigen::Map<const Eigen::VectorXd> vin(v.data(), static_cast<Eigen::Index>(v.size()));
  Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())).noalias() =
      matrix_.selfadjointView<Eigen::Lower>() * vin;
  return out;
}

const EigenDecomposition& DiscreteOperator::decomposition() const {
  std::call_once(cache_->once, [this] {
    cache_->value = std::make_unique<EigenDecomposition>(dense_sym_eigen(matrix_, eigen_cap_));
    cache_->ready.store(true, std::memory_order_release);
  });
  return *cache_->value;
}

bool DiscreteOperator::has_decomposition() const {
  return cache_->ready.load(std::memory_order_acquire);
}

namespace {

constexpr double kSeriesRadius = 1.0;
constexpr int kSeriesTerms = 20;

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_order(int j) {
  if (j < 0 || j > 3) {
    throw Error(ErrorCode::InvalidOrder, "phi: order must be in {0,1,2,3}, got " + std::to_string(j));
  }
}

}  // namespace

double phi(int j, double z) {
  check_order(j);
  if (j == 0) return std::exp(z);
  if (std::abs(z) < kSeriesRadius) {
    // sum_{k>=0} z^k/(k+j)!, Horner form
    double acc = 0.0;
    for (int k = kSeriesTerms - 1; k >= 0; --k) acc = acc * z + 1.0 / factorial(k + j);
    return acc;
  }
  double value = std::expm1(z) / z;
  for (int k = 1; k < j; ++k) value = (value - 1.0 / factorial(k)) / z;
  return value;
}

std::vector<double> exp_action(const EigenDecomposition& decomp, double t,
                               std::span<const double> v) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "exp_action: t must be >= 0");
  return spectral_apply(decomp, v, [t](double lambda) { return std::exp(t * lambda); });
}

std::vector<double> phi_action(const EigenDecomposition& decomp, int j, double t,
                               std::span<const double> v) {
  check_order(j);
  if (j >= 1 && !(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "phi_action: t must be > 0");
  if (j == 0 && !(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "phi_action: t must be >= 0");
  return spectral_apply(decomp, v, [j, t](double lambda) { return phi(j, t * lambda); });
}

namespace {

using SelfAdjointLower = Eigen::SelfAdjointView<const Eigen::MatrixXd, Eigen::Lower>;

// Plain CG on (-mat) x = b starting from x; stops at ||b + mat x|| <= target.
void cg_iterate(const SelfAdjointLower& mat, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                double target, std::size_t max_iter) {
  Eigen::VectorXd r = b + mat * x;
  Eigen::VectorXd p = r;
  Eigen::VectorXd ap(b.size());
  double rr = r.squaredNorm();
  std::size_t it = 0;
  while (std::sqrt(rr) > target) {
    if (it++ == max_iter) {
      throw Error(ErrorCode::NoConvergence, "cg_solve: no convergence after " +
                                                std::to_string(max_iter) + " iterations");
    }
    ap.noalias() = -(mat * p);
    const double alpha = rr / p.dot(ap);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
}

}  // namespace

std::vector<double> cg_solve(const DiscreteOperator& op, std::span<const double> rhs, double tol) {
  const std::size_t n = op.dimension();
  detail::check_dimension(n, rhs.size(), "cg_solve");
  if (!(tol > 0.0 && tol <= 1e-2)) {
    throw Error(ErrorCode::InvalidArgument, "cg_solve: tol must lie in (0, 1e-2]");
  }
  const auto ni = static_cast<Eigen::Index>(n);
  const SelfAdjointLower mat = op.matrix().selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd b = -Eigen::Map<const Eigen::VectorXd>(rhs.data(), ni);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ni);
  std::vector<double> out(n, 0.0);
  const double target = tol * b.norm();
  if (target == 0.0) return out;

  // The recursive residual drifts from the true one; restart from the true
  // residual a couple of times if needed.
  const std::size_t max_iter = 10 * n;
  for (int restart = 0; restart < 3; ++restart) {
    cg_iterate(mat, b, x, target, max_iter);
    if ((b + mat * x).norm() <= target) break;
  }
  Eigen::Map<Eigen::VectorXd>(out.data(), ni) = x;
  return out;
}

}  // namespace expsplit
