#include "expsplit/norms.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "expsplit/error.hpp"

namespace expsplit {

NormKind NormKind::fractional(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "fractional norm exponent must lie in [0, 2]");
  }
  return {Tag::Fractional, gamma};
}

NormKind NormKind::parse(std::string_view text) {
  if (text == "l2" || text == "L2") return l2();
  if (text == "dual") return dual();
  constexpr std::string_view prefix = "frac:";
  if (text.starts_with(prefix)) {
    const auto num = text.substr(prefix.size());
    // std::from_chars for double is missing on older libstdc++.
    std::istringstream in{std::string(num)};
    double g = 0.0;
    in >> g;
    if (!in || !in.eof()) throw Error(ErrorCode::InvalidArgument, "bad norm '" + std::string(text) + "'");
    return fractional(g);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown norm '" + std::string(text) + "'");
}

std::string NormKind::name() const {
  switch (tag) {
    case Tag::L2: return "l2";
    case Tag::Dual: return "dual";
    case Tag::Fractional: {
      std::ostringstream out;
      out << "frac:" << gamma;
      return out.str();
    }
  }
  return "unknown";
}

std::string NormKind::display_name() const {
  switch (tag) {
    case Tag::L2: return "discrete L2 norm";
    case Tag::Dual: return "dual norm ||L^-1 . ||";
    case Tag::Fractional: {
      std::ostringstream out;
      out << "||(-L)^" << gamma << " . ||";
      return out.str();
    }
  }
  return "unknown";
}

double discrete_l2(const GridFunction& u) {
  const Grid& g = u.grid();
  return std::sqrt(g.dx() * g.dy() * u.eigen().squaredNorm());
}

double dual_norm(const DiscreteOperator& op, const GridFunction& u) {
  detail::check_dimension(op.dimension(), u.size(), "dual_norm");
  if (op.has_decomposition()) {
    const auto v = spectral_apply(op.decomposition(), u.values(),
                                  [](double lambda) { return 1.0 / lambda; });
    return discrete_l2(GridFunction(u.grid(), v));
  }
  return discrete_l2(GridFunction(u.grid(), cg_solve(op, u.values())));
}

GridFunction fractional_apply(const DiscreteOperator& op, double gamma, const GridFunction& u) {
  if (!op.has_decomposition()) {
    throw Error(ErrorCode::DecompositionMissing, "fractional_apply needs a cached decomposition");
  }
  if (gamma == 0.0) return u;
  const auto v = spectral_apply(op.decomposition(), u.values(),
                                [gamma](double lambda) { return std::pow(-lambda, gamma); });
  return GridFunction(u.grid(), v);
}

double measure(const NormKind& norm, const DiscreteOperator& op, const GridFunction& u) {
  switch (norm.tag) {
    case NormKind::Tag::L2: return discrete_l2(u);
    case NormKind::Tag::Dual: return dual_norm(op, u);
    case NormKind::Tag::Fractional: {
      op.decomposition();
      return discrete_l2(fractional_apply(op, norm.gamma, u));
    }
  }
  return 0.0;
}

std::vector<SmoothingSample> smoothing_probe(const Discretization& disc, double alpha,
                                             Scheme scheme, double h, int n_max) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "smoothing_probe: alpha must lie in [0, 1)");
  }
  if (scheme == Scheme::StrangB) {
    throw Error(ErrorCode::InvalidArgument, "smoothing_probe: scheme must be lie or strang");
  }
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "smoothing_probe: n_max must be >= 1");

  const auto& ed = disc.full_operator().decomposition();
  const auto n = static_cast<Eigen::Index>(disc.grid().size());
  // (-L)^{2 alpha}, so that ||(-L)^alpha P v||^2 = v^T P^T W P v.
  const Eigen::VectorXd w = (-ed.eigenvalues.array()).pow(2.0 * alpha);
  const Eigen::MatrixXd weight = ed.eigenvectors * w.asDiagonal() * ed.eigenvectors.transpose();

  const SplittingStepper stepper(disc.a(), disc.b(), h);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);

  std::vector<SmoothingSample> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int step = 1; step <= n_max; ++step) {
    if (scheme == Scheme::Lie) {
      stepper.exp_b_full().apply_columns(power);
      stepper.exp_a_full().apply_columns(power);
    } else {
      stepper.exp_a_half().apply_columns(power);
      stepper.exp_b_full().apply_columns(power);
      stepper.exp_a_half().apply_columns(power);
    }

    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    v.normalize();
    Eigen::VectorXd z(n);
    for (int it = 0; it < 30; ++it) {
      z.noalias() = power * v;
      const Eigen::VectorXd wz = weight * z;
      v.noalias() = power.transpose() * wz;
      const double norm = v.norm();
      if (norm == 0.0) break;
      v /= norm;
    }
    z.noalias() = power * v;
    const double estimate = std::sqrt(std::max(0.0, z.dot(weight * z)));
    out.push_back({step, step * h, estimate});
  }
  return out;
}

}  // namespace expsplit
