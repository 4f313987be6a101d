#pragma once

#include <string_view>
#include <vector>

#include "expsplit/grid.hpp"
#include "expsplit/problems.hpp"

namespace expsplit {

enum class Scheme { Lie, Strang, StrangB };

std::string_view to_string(Scheme s) noexcept;
/// Accepts "lie", "strang", "strangb" (case-insensitive).
Scheme parse_scheme(std::string_view name);
std::vector<Scheme> parse_scheme_list(std::string_view comma_separated);

/// Uniform time grid t_n = n T / N.
struct TimeGrid {
  double final_time = 1.0;
  int n_steps = 1;

  TimeGrid(double final_time, int n_steps);

  double step() const noexcept { return final_time / n_steps; }
  /// Computed as n T / N so no rounding accumulates across steps.
  double time(int n) const noexcept { return (static_cast<double>(n) * final_time) / n_steps; }
};

/// Line propagators for a fixed step h, reused across all steps of a run.
class SplittingStepper {
 public:
  SplittingStepper(const LineOperatorFamily& a, const LineOperatorFamily& b, double h);

  double step() const noexcept { return h_; }
  const Grid& grid() const noexcept { return grid_; }

  /// e^{hA} e^{hB} (u + h g(t_n))
  GridFunction lie(const GridFunction& u, const GridFunction& g_tn) const;
  /// e^{hA/2} e^{hB/2} (e^{hB/2} e^{hA/2} u + h g(t_n + h/2))
  GridFunction strang(const GridFunction& u, const GridFunction& g_mid) const;
  /// e^{hA/2} e^{hB} e^{hA/2} (u + h/2 g(t_n)) + h/2 g(t_n + h)
  GridFunction strang_b(const GridFunction& u, const GridFunction& g_tn,
                        const GridFunction& g_tn1) const;

  /// e^{hA} e^{hB} u
  GridFunction lie_homogeneous(const GridFunction& u) const;
  /// e^{hA/2} e^{hB} e^{hA/2} u
  GridFunction strang_homogeneous(const GridFunction& u) const;

  const LinePropagator& exp_a_full() const noexcept { return exp_a_full_; }
  const LinePropagator& exp_b_full() const noexcept { return exp_b_full_; }
  const LinePropagator& exp_a_half() const noexcept { return exp_a_half_; }
  const LinePropagator& exp_b_half() const noexcept { return exp_b_half_; }

 private:
  Grid grid_;
  double h_;
  LinePropagator exp_a_full_;
  LinePropagator exp_b_full_;
  LinePropagator exp_a_half_;
  LinePropagator exp_b_half_;
};

GridFunction lie_step(const LineOperatorFamily& a, const LineOperatorFamily& b, double h,
                      const GridFunction& u, const GridFunction& g_tn);
GridFunction strang_step(const LineOperatorFamily& a, const LineOperatorFamily& b, double h,
                         const GridFunction& u, const GridFunction& g_mid);
GridFunction strang_b_step(const LineOperatorFamily& a, const LineOperatorFamily& b, double h,
                           const GridFunction& u, const GridFunction& g_tn,
                           const GridFunction& g_tn1);

/// n_steps steps of `scheme` from the problem's initial value. g is
/// evaluated at t_n (Lie), t_n + h/2 (Strang), t_n and t_{n+1} (Strang B).
GridFunction integrate(Scheme scheme, const Discretization& disc, const ProblemSpec& problem,
                       const TimeGrid& time);

/// Exponential quadrature on the unsplit operator,
///   u_{n+1} = e^{hL} u_n + h phi_1(hL) g(t_n) + h^2 phi_2(hL) g'(t_n) + h^3 phi_3(hL) g''(t_n),
/// carried out in the eigenbasis of L. Needs g' and g'' (MissingDerivative)
/// and a dense eigendecomposition of L (DimensionCapExceeded).
GridFunction reference_solve(const Discretization& disc, const ProblemSpec& problem,
                             const TimeGrid& time);

}  // namespace expsplit
