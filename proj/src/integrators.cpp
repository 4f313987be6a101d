#include "expsplit/integrators.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "expsplit/error.hpp"

namespace expsplit {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::Lie: return "lie";
    case Scheme::Strang: return "strang";
    case Scheme::StrangB: return "strangb";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lie") return Scheme::Lie;
  if (lower == "strang") return Scheme::Strang;
  if (lower == "strangb" || lower == "strang_b" || lower == "strang-b") return Scheme::StrangB;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

std::vector<Scheme> parse_scheme_list(std::string_view comma_separated) {
  std::vector<Scheme> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const std::size_t end = std::min(comma_separated.find(',', start), comma_separated.size());
    const auto item = comma_separated.substr(start, end - start);
    if (!item.empty()) {
      const Scheme s = parse_scheme(item);
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty scheme list");
  return out;
}

TimeGrid::TimeGrid(double final_time_, int n_steps_) : final_time(final_time_), n_steps(n_steps_) {
  if (!(final_time > 0.0)) throw Error(ErrorCode::InvalidArgument, "TimeGrid: T must be > 0");
  if (n_steps < 0) throw Error(ErrorCode::InvalidArgument, "TimeGrid: negative step count");
}

SplittingStepper::SplittingStepper(const LineOperatorFamily& a, const LineOperatorFamily& b, double h)
    : grid_(a.grid()),
      h_(h),
      exp_a_full_(a.propagator(h)),
      exp_b_full_(b.propagator(h)),
      exp_a_half_(a.propagator(0.5 * h)),
      exp_b_half_(b.propagator(0.5 * h)) {
  check_same_grid(grid_, b.grid(), "SplittingStepper");
  if (a.direction() != Direction::X || b.direction() != Direction::Y) {
    throw Error(ErrorCode::InvalidArgument, "SplittingStepper: expected (X, Y) families");
  }
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "SplittingStepper: h must be > 0");
}

GridFunction SplittingStepper::lie(const GridFunction& u, const GridFunction& g_tn) const {
  check_same_grid(grid_, u.grid(), "lie_step");
  check_same_grid(grid_, g_tn.grid(), "lie_step");
  GridFunction v = u;
  v.axpy(h_, g_tn);
  exp_b_full_.apply(v);
  exp_a_full_.apply(v);
  return v;
}

GridFunction SplittingStepper::strang(const GridFunction& u, const GridFunction& g_mid) const {
  check_same_grid(grid_, u.grid(), "strang_step");
  check_same_grid(grid_, g_mid.grid(), "strang_step");
  GridFunction v = u;
  exp_a_half_.apply(v);
  exp_b_half_.apply(v);
  v.axpy(h_, g_mid);
  exp_b_half_.apply(v);
  exp_a_half_.apply(v);
  return v;
}

GridFunction SplittingStepper::strang_b(const GridFunction& u, const GridFunction& g_tn,
                                        const GridFunction& g_tn1) const {
  check_same_grid(grid_, u.grid(), "strang_b_step");
  check_same_grid(grid_, g_tn.grid(), "strang_b_step");
  check_same_grid(grid_, g_tn1.grid(), "strang_b_step");
  GridFunction v = u;
  v.axpy(0.5 * h_, g_tn);
  exp_a_half_.apply(v);
  exp_b_full_.apply(v);
  exp_a_half_.apply(v);
  v.axpy(0.5 * h_, g_tn1);
  return v;
}

GridFunction SplittingStepper::lie_homogeneous(const GridFunction& u) const {
  check_same_grid(grid_, u.grid(), "lie_homogeneous");
  GridFunction v = u;
  exp_b_full_.apply(v);
  exp_a_full_.apply(v);
  return v;
}

GridFunction SplittingStepper::strang_homogeneous(const GridFunction& u) const {
  check_same_grid(grid_, u.grid(), "strang_homogeneous");
  GridFunction v = u;
  exp_a_half_.apply(v);
  exp_b_full_.apply(v);
  exp_a_half_.apply(v);
  return v;
}

GridFunction lie_step(const LineOperatorFamily& a, const LineOperatorFamily& b, double h,
                      const GridFunction& u, const GridFunction& g_tn) {
  return SplittingStepper(a, b, h).lie(u, g_tn);
}

GridFunction strang_step(const LineOperatorFamily& a, const LineOperatorFamily& b, double h,
                         const GridFunction& u, const GridFunction& g_mid) {
  return SplittingStepper(a, b, h).strang(u, g_mid);
}

GridFunction strang_b_step(const LineOperatorFamily& a, const LineOperatorFamily& b, double h,
                           const GridFunction& u, const GridFunction& g_tn,
                           const GridFunction& g_tn1) {
  return SplittingStepper(a, b, h).strang_b(u, g_tn, g_tn1);
}

GridFunction integrate(Scheme scheme, const Discretization& disc, const ProblemSpec& problem,
                       const TimeGrid& time) {
  GridFunction u = problem.initial_value(disc);
  if (time.n_steps == 0) return u;

  const SampledSource source(problem, disc);
  const SplittingStepper stepper(disc.a(), disc.b(), time.step());
  const double h = time.step();
  GridFunction g0(disc.grid());
  GridFunction g1(disc.grid());
  for (int n = 0; n < time.n_steps; ++n) {
    const double tn = time.time(n);
    switch (scheme) {
      case Scheme::Lie:
        source.evaluate(tn, 0, g0);
        u = stepper.lie(u, g0);
        break;
      case Scheme::Strang:
        source.evaluate(tn + 0.5 * h, 0, g0);
        u = stepper.strang(u, g0);
        break;
      case Scheme::StrangB:
        source.evaluate(tn, 0, g0);
        source.evaluate(time.time(n + 1), 0, g1);
        u = stepper.strang_b(u, g0, g1);
        break;
    }
  }
  return u;
}

GridFunction reference_solve(const Discretization& disc, const ProblemSpec& problem,
                             const TimeGrid& time) {
  for (int k = 1; k <= 2; ++k) {
    if (!problem.has_source_derivative(k)) {
      throw Error(ErrorCode::MissingDerivative,
                  problem.label + ": reference solver needs g' and g''");
    }
  }
  GridFunction u0 = problem.initial_value(disc);
  if (time.n_steps == 0) return u0;

  const EigenDecomposition& ed = disc.full_operator().decomposition();
  const Eigen::MatrixXd& q = ed.eigenvectors;
  const SampledSource source(problem, disc);
  const Eigen::Index n = ed.eigenvalues.size();

  // Spatial shapes projected once onto the eigenbasis.
  const auto terms = static_cast<Eigen::Index>(source.term_count());
  Eigen::MatrixXd shapes(n, terms);
  for (Eigen::Index k = 0; k < terms; ++k) {
    shapes.col(k) = source.shape(static_cast<std::size_t>(k)).eigen();
  }
  const Eigen::MatrixXd projected = q.transpose() * shapes;

  const double h = time.step();
  Eigen::VectorXd decay(n);
  Eigen::VectorXd w1(n);
  Eigen::VectorXd w2(n);
  Eigen::VectorXd w3(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = h * ed.eigenvalues[i];
    decay[i] = std::exp(z);
    w1[i] = h * phi(1, z);
    w2[i] = h * h * phi(2, z);
    w3[i] = h * h * h * phi(3, z);
  }

  Eigen::VectorXd coeffs = q.transpose() * u0.eigen();
  Eigen::VectorXd c0(terms);
  Eigen::VectorXd c1(terms);
  Eigen::VectorXd c2(terms);
  for (int step = 0; step < time.n_steps; ++step) {
    const double tn = time.time(step);
    coeffs.array() *= decay.array();
    if (terms == 0) continue;
    for (Eigen::Index k = 0; k < terms; ++k) {
      const auto& prof = source.profile(static_cast<std::size_t>(k));
      c0[k] = prof.derivative(0, tn);
      c1[k] = prof.derivative(1, tn);
      c2[k] = prof.derivative(2, tn);
    }
    coeffs.array() += w1.array() * (projected * c0).array() +
                      w2.array() * (projected * c1).array() +
                      w3.array() * (projected * c2).array();
  }

  GridFunction out(disc.grid());
  out.eigen() = q * coeffs;
  return out;
}

}  // namespace expsplit
