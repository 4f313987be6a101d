#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace expsplit {

/// Symmetric tridiagonal matrix: `diag` has n entries, `offdiag` n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const noexcept { return diag.size(); }
  Eigen::MatrixXd to_dense() const;
};

/// M = Q diag(eigenvalues) Q^T with eigenvalues ascending and column k of
/// `eigenvectors` belonging to eigenvalue k.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

inline constexpr std::size_t kDefaultDenseEigenCap = 4500;

/// Implicit-shift QL on the tridiagonal form. Throws NoConvergence when an
/// eigenvalue needs more than 50 n sweeps.
EigenDecomposition sym_tridiag_eigen(const SymTridiag& m);

/// Full eigendecomposition of a dense symmetric matrix (LAPACK dsyevd).
/// Only the lower triangle is read.
EigenDecomposition dense_sym_eigen(const Eigen::MatrixXd& m,
                                   std::size_t cap = kDefaultDenseEigenCap);

/// Dense symmetric operator with a lazily computed eigendecomposition.
/// Copies share the cached decomposition; initialization happens once even
/// under concurrent access.
class DiscreteOperator {
 public:
  DiscreteOperator() = default;
  explicit DiscreteOperator(Eigen::MatrixXd matrix, std::size_t eigen_cap = kDefaultDenseEigenCap);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  std::vector<double> apply(std::span<const double> v) const;

  /// Computes the decomposition on first use.
  const EigenDecomposition& decomposition() const;
  bool has_decomposition() const;

 private:
  struct Cache {
    std::once_flag once;
    std::atomic<bool> ready{false};
    std::unique_ptr<EigenDecomposition> value;
  };

  Eigen::MatrixXd matrix_;
  std::size_t eigen_cap_ = kDefaultDenseEigenCap;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Scalar phi functions: phi_0(z) = e^z, phi_{j+1}(z) = (phi_j(z) - 1/j!)/z.
double phi(int j, double z);

/// Q exp(t Lambda) Q^T v.
std::vector<double> exp_action(const EigenDecomposition& decomp, double t,
                               std::span<const double> v);

/// Q phi_j(t Lambda) Q^T v for j in {0,1,2,3}.
std::vector<double> phi_action(const EigenDecomposition& decomp, int j, double t,
                               std::span<const double> v);

/// Q f(Lambda) Q^T v for an arbitrary spectral weight f.
template <typename F>
std::vector<double> spectral_apply(const EigenDecomposition& decomp, std::span<const double> v,
                                   F&& weight);

inline constexpr double kDefaultCgTolerance = 1e-12;

/// Solves op x = rhs for an operator whose negation is SPD, to relative
/// residual `tol`. Throws NoConvergence after 10 n iterations.
std::vector<double> cg_solve(const DiscreteOperator& op, std::span<const double> rhs,
                             double tol = kDefaultCgTolerance);

namespace detail {
void check_dimension(std::size_t expected, std::size_t actual, const char* what);
}

template <typename F>
std::vector<double> spectral_apply(const EigenDecomposition& decomp, std::span<const double> v,
                                   F&& weight) {
  detail::check_dimension(decomp.size(), v.size(), "spectral_apply");
  const Eigen::Map<const Eigen::VectorXd> vin(v.data(), static_cast<Eigen::Index>(v.size()));
  Eigen::VectorXd coeffs = decomp.eigenvectors.transpose() * vin;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= weight(decomp.eigenvalues[k]);
  std::vector<double> out(v.size());
  Eigen::Map<Eigen::VectorXd>(out.data(), coeffs.size()) = decomp.eigenvectors * coeffs;
  return out;
}

}  // namespace expsplit
