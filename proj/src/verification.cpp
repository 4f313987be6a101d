#include "expsplit/verification.hpp"

#include <cmath>
#include <random>

#include "expsplit/grid.hpp"
#include "expsplit/integrators.hpp"
#include "expsplit/problems.hpp"

namespace expsplit {

Eigen::MatrixXd dense_expm(const Eigen::MatrixXd& m) {
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  while (norm1 / std::ldexp(1.0, squarings) > 0.5) ++squarings;
  const Eigen::MatrixXd scaled = m / std::ldexp(1.0, squarings);
  const auto n = m.rows();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

namespace {

Eigen::MatrixXd dense_of(const LineOperatorFamily& fam) {
  const Grid& g = fam.grid();
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    GridFunction e(g);
    e.values()[static_cast<std::size_t>(c)] = 1.0;
    m.col(c) = apply_split_operator(fam, e).eigen();
  }
  return m;
}

GridFunction random_function(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  GridFunction u(g);
  for (double& v : u.values()) v = uni(rng);
  return u;
}

double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double scale) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(0.01, 1.0);

  // Step functions against literal dense compositions.
  for (int n : {2, 4, 6}) {
    const Discretization disc(example_coefficients(), Grid::square(n));
    const Eigen::MatrixXd a = dense_of(disc.a());
    const Eigen::MatrixXd b = dense_of(disc.b());
    double worst[3] = {0.0, 0.0, 0.0};
    for (int draw = 0; draw < 5; ++draw) {
      // Keep h |A| of order one so the propagators are far from both I and 0.
      const double h = step(rng) * disc.grid().dx() * disc.grid().dx();
      const GridFunction u = random_function(disc.grid(), rng);
      const GridFunction g0 = random_function(disc.grid(), rng);
      const GridFunction g1 = random_function(disc.grid(), rng);
            const Eigen::MatrixXd ea = dense_expm(h * a);
      const Eigen::MatrixXd eb = dense_expm(h * b);
      const Eigen::MatrixXd ea2 = dense_expm(0.5 * h * a);
      const Eigen::MatrixXd eb2 = dense_expm(0.5 * h * b);
      const Eigen::VectorXd lie = ea * eb * (u.eigen() + h * g0.eigen());
      const Eigen::VectorXd strang = ea2 * eb2 * (eb2 * ea2 * u.eigen() + h * g0.eigen());
      const Eigen::VectorXd strang_b =
          ea2 * eb * ea2 * (u.eigen() + 0.5 * h * g0.eigen()) + 0.5 * h * g1.eigen();
      worst[0] = std::max(worst[0], rel_diff(lie_step(disc.a(), disc.b(), h, u, g0).eigen(), lie, lie.cwiseAbs().maxCoeff()));
      worst[1] = std::max(worst[1], rel_diff(strang_step(disc.a(), disc.b(), h, u, g0).eigen(), strang, strang.cwiseAbs().maxCoeff()));
      worst[2] = std::max(worst[2],
                          rel_diff(strang_b_step(disc.a(), disc.b(), h, u, g0, g1).eigen(), strang_b, strang_b.cwiseAbs().maxCoeff()));
    }
    const char* names[3] = {"lie", "strang", "strangb"};
    for (int s = 0; s < 3; ++s) {
      out.push_back({"dense-oracle/" + std::string(names[s]) + "/" + std::to_string(n) + "x" +
                         std::to_string(n),
                     worst[s] <= 1e-10, worst[s], 1e-10});
    }
  }

  // Commuting split without source: every scheme is the exact flow.
  {
    const ProblemSpec heat = problem_by_label("manufactured:heat");
    const Discretization disc = heat.discretize(Grid::square(5));
    const GridFunction u0 = heat.initial_value(disc);
    const double T = 0.05;
    const auto exact = exp_action(disc.full_operator().decomposition(), T, u0.values());
    const Eigen::Map<const Eigen::VectorXd> ex(exact.data(), static_cast<Eigen::Index>(exact.size()));
    for (Scheme s : {Scheme::Lie, Scheme::Strang, Scheme::StrangB}) {
      double worst = 0.0;
      for (int steps : {1, 3, 8}) {
        const GridFunction u = integrate(s, disc, heat, TimeGrid(T, steps));
        worst = std::max(worst, rel_diff(u.eigen(), ex, ex.cwiseAbs().maxCoeff()));
      }
      out.push_back({"commuting-exact/" + std::string(to_string(s)), worst <= 1e-10, worst, 1e-10});
    }
  }

  // phi recurrence phi_j(tM) v = v/j! + tM phi_{j+1}(tM) v.
  {
    const int n = 12;
    Eigen::MatrixXd r = Eigen::MatrixXd::Random(n, n);
    const Eigen::MatrixXd m = -(r * r.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n));
    const EigenDecomposition ed = dense_sym_eigen(m);
    Eigen::VectorXd v = Eigen::VectorXd::Random(n);
    const std::span<const double> vs(v.data(), static_cast<std::size_t>(n));
    const double t = 0.37;
    double worst = 0.0;
    double fact = 1.0;
    for (int j = 0; j <= 2; ++j) {
      if (j > 0) fact *= j;
      const auto lhs = phi_action(ed, j, t, vs);
      const auto next = phi_action(ed, j + 1, t, vs);
      const Eigen::Map<const Eigen::VectorXd> l(lhs.data(), n);
      const Eigen::Map<const Eigen::VectorXd> nx(next.data(), n);
      const Eigen::VectorXd rhs = v / fact + t * (m * nx);
      worst = std::max(worst, (l - rhs).norm() / v.norm());
    }
    out.push_back({"phi-recurrence", worst <= 1e-11, worst, 1e-11});
  }

  // Homogeneous reference: many steps agree with one exact step.
  {
    const ProblemSpec heat = problem_by_label("manufactured:heat");
    const Discretization disc = heat.discretize(Grid::square(6));
    const GridFunction one = reference_solve(disc, heat, TimeGrid(0.05, 1));
    const GridFunction many = reference_solve(disc, heat, TimeGrid(0.05, 64));
    const double d = rel_diff(one.eigen(), many.eigen(), one.max_abs());
    out.push_back({"reference-homogeneous", d <= 1e-11, d, 1e-11});
  }

  // Conjugate gradients against the spectral solve.
  {
    const Discretization disc(example_coefficients(), Grid::square(6));
    const GridFunction rhs = random_function(disc.grid(), rng);
    const auto cg = cg_solve(disc.full_operator(), rhs.values());
    const auto spectral = spectral_apply(disc.full_operator().decomposition(), rhs.values(),
                                         [](double l) { return 1.0 / l; });
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < cg.size(); ++i) {
      num += (cg[i] - spectral[i]) * (cg[i] - spectral[i]);
      den += spectral[i] * spectral[i];
    }
    const double d = std::sqrt(num / den);
    out.push_back({"cg-vs-spectral", d <= 1e-9, d, 1e-9});
  }
  return out;
}

}  // namespace expsplit
