#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "expsplit/grid.hpp"

namespace expsplit {

enum class Formulation { Standard, HomogenizedBc, ExtrapolationBc };

std::string_view to_string(Formulation f) noexcept;

/// A scalar function of time together with its first few analytic
/// derivatives. Slot k holds the k-th derivative; empty slots are unknown.
class TimeProfile {
 public:
  using Function = std::function<double(double)>;
  static constexpr int kMaxDerivative = 3;

  explicit TimeProfile(std::vector<Function> derivatives);

  static TimeProfile constant(double c);
  /// c * t
  static TimeProfile linear(double c = 1.0);
  /// c * e^t
  static TimeProfile exponential(double c = 1.0);

  bool has_derivative(int k) const noexcept;
  /// Throws MissingDerivative if slot k is empty.
  double derivative(int k, double t) const;
  double operator()(double t) const { return derivative(0, t); }

  TimeProfile differentiated() const;
  TimeProfile scaled(double s) const;

 private:
  std::vector<Function> slots_;
};

using SpatialSampler = std::function<GridFunction(const Discretization&)>;

/// One separable inhomogeneity term tau(t) * s(x, y). `pointwise`, when
/// set, evaluates s anywhere on the closed square (used for boundary checks).
struct SourceTerm {
  TimeProfile time;
  SpatialSampler spatial;
  ScalarField pointwise;

  static SourceTerm from_field(TimeProfile time, ScalarField s);
};

/// One separable term tau(t) * S(x, y) of a Dirichlet lift F. `interior`
/// gives S at the interior nodes, `trace` its boundary values; `applied`
/// optionally supplies L S analytically, otherwise L S is formed on the
/// extended grid (interior stencil plus boundary coupling).
struct LiftTerm {
  TimeProfile time;
  SpatialSampler interior;
  ScalarField trace;
  SpatialSampler applied;

  static LiftTerm from_field(TimeProfile time, ScalarField s);
  /// S = discrete harmonic lift of the boundary data f.
  static LiftTerm discrete_harmonic(TimeProfile time, ScalarField f);
};

/// Semidiscrete problem u' = L u + g(t), u(0) = u0 on the unit square.
struct ProblemSpec {
  std::string label;
  CoefficientField coefficients;
  SpatialSampler initial;
  std::vector<SourceTerm> sources;
  Formulation formulation = Formulation::Standard;
  bool g_vanishes_on_boundary = false;
  /// Homogenized problems: the recovered solution is u + F(t).
  std::vector<LiftTerm> lift;
  /// Boundary data for boundary-driven problems (time independent).
  ScalarField boundary_trace;

  Discretization discretize(const Grid& grid) const { return Discretization(coefficients, grid); }

  GridFunction initial_value(const Discretization& disc) const;
  bool has_source_derivative(int k) const noexcept;
  /// k-th time derivative of g at time t.
  GridFunction source(double t, const Discretization& disc, int k = 0) const;
  /// Pointwise k-th time derivative of g; throws InvalidArgument when a term
  /// has no pointwise evaluator.
  double source_pointwise(double t, double x, double y, int k = 0) const;
  /// Solution of the original boundary problem from the computed u.
  GridFunction recover(double t, const GridFunction& u, const Discretization& disc) const;
};

/// Spatial parts sampled once on a discretization; g^(k)(t) is then a cheap
/// linear combination.
class SampledSource {
 public:
  SampledSource(const ProblemSpec& problem, const Discretization& disc);

  std::size_t term_count() const noexcept { return shapes_.size(); }
  const GridFunction& shape(std::size_t k) const { return shapes_.at(k); }
  const TimeProfile& profile(std::size_t k) const { return profiles_.at(k); }
  bool empty() const noexcept { return shapes_.empty(); }

  GridFunction at(double t, int derivative = 0) const;
  /// out = g^(derivative)(t)
  void evaluate(double t, int derivative, GridFunction& out) const;

 private:
  Grid grid_;
  std::vector<GridFunction> shapes_;
  std::vector<TimeProfile> profiles_;
};

/// exp(8 - 1/(x(1-x)) - 1/(y(1-y))), zero outside the open square.
double bump(double x, double y);

/// L = d_x((2xy+3) d_x) + d_y((2xy^4+1) d_y)
CoefficientField example_coefficients();

/// Source x(1-x)y(1-y) + t e^{x^3 y}: does not vanish on the boundary for t > 0.
ProblemSpec example_order_reduction();
/// Source x(1-x)y(1-y) e^t: vanishes on the boundary.
ProblemSpec example_full_order();
/// Boundary value 1 in the extrapolation-space form y' = L y + c, with c the
/// boundary coupling vector of the constant trace.
ProblemSpec example_inhomogeneous_bc();

/// Discrete harmonic lift: L_h v = -boundary_coupling_vector(f).
GridFunction dirichlet_lift(const Discretization& disc, const ScalarField& f);

/// U = w - F with psi = L F - dF/dt and U0 = w0 - F(0). Throws
/// MissingLiftDerivative when a lift term has no time derivative.
ProblemSpec homogenize(const ProblemSpec& problem, std::vector<LiftTerm> lift);

/// "example1", "example2", "example3", or "manufactured:<name>".
ProblemSpec problem_by_label(std::string_view label);
std::vector<std::string> problem_labels();

}  // namespace expsplit
