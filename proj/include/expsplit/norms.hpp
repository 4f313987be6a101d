#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "expsplit/grid.hpp"
#include "expsplit/integrators.hpp"

namespace expsplit {

/// Error norm: discrete L2, the dual norm ||L^{-1} .||, or ||(-L)^gamma .||.
struct NormKind {
  enum class Tag { L2, Dual, Fractional };

  Tag tag = Tag::L2;
  double gamma = 0.0;

  static NormKind l2() { return {Tag::L2, 0.0}; }
  static NormKind dual() { return {Tag::Dual, 0.0}; }
  /// gamma in [0, 2]
  static NormKind fractional(double gamma);
  /// "l2" | "dual" | "frac:<gamma>"
  static NormKind parse(std::string_view text);

  std::string name() const;
  /// Human-readable label for plots.
  std::string display_name() const;
  bool needs_operator() const noexcept { return tag != Tag::L2; }
};

/// sqrt(dx dy sum u^2)
double discrete_l2(const GridFunction& u);

/// discrete_l2(L^{-1} u); spectral when L has a cached decomposition,
/// conjugate gradients otherwise.
double dual_norm(const DiscreteOperator& op, const GridFunction& u);

/// Q (-Lambda)^gamma Q^T u. Throws DecompositionMissing unless the
/// decomposition of `op` is already cached.
GridFunction fractional_apply(const DiscreteOperator& op, double gamma, const GridFunction& u);

double measure(const NormKind& norm, const DiscreteOperator& op, const GridFunction& u);

struct SmoothingSample {
  int step = 0;
  double time = 0.0;
  double estimate = 0.0;
};

/// Estimates ||(-L)^alpha S^n||_2 for n = 1..n_max, where S is the Lie
/// product e^{hA} e^{hB} or the Strang product e^{hA/2} e^{hB} e^{hA/2},
/// by 30 power iterations on the symmetrized product from a fixed seed.
std::vector<SmoothingSample> smoothing_probe(const Discretization& disc, double alpha,
                                             Scheme scheme, double h, int n_max);

}  // namespace expsplit
