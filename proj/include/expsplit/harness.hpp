#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expsplit/integrators.hpp"
#include "expsplit/norms.hpp"

namespace expsplit {

/// One convergence study: a problem, the schemes to compare, the error norm
/// and the step sizes h_k = T / 2^k for k = kmin..kmax.
struct StudyConfig {
  std::string problem = "example1";
  std::vector<Scheme> schemes{Scheme::Lie, Scheme::Strang, Scheme::StrangB};
  NormKind norm = NormKind::l2();
  int grid = 63;
  double final_time = 1.0;
  int kmin = 6;
  int kmax = 11;
  int ref_factor = 32;
  std::string out_dir;
  bool plot = false;
  int threads = 1;
  /// Dashed guide slopes for the plot; empty selects defaults per problem/norm.
  std::vector<double> guide_slopes;

  /// Small, fast profile used by the test suite: 31x31 grid, k = 3..8.
  static StudyConfig ci_profile(std::string problem);

  std::vector<double> step_sizes() const;
  int reference_steps() const;
  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
  std::vector<double> effective_guide_slopes() const;
};

/// Applies keys from a JSON object (same names as the CLI flags, e.g.
/// "problem", "schemes", "norm", "grid", "T", "kmin", "kmax", "ref-factor",
/// "out", "plot", "threads", "slopes") on top of `base`.
StudyConfig apply_json_config(const StudyConfig& base, std::string_view json_text);

struct Measurement {
  double h = 0.0;
  double error = 0.0;
};

struct OrderFit {
  double order = 0.0;
  /// RMS deviation of log(error) from the fitted line.
  double residual = 0.0;
  std::size_t points_used = 0;
};

struct SchemeSeries {
  Scheme scheme = Scheme::Lie;
  std::vector<Measurement> points;
  OrderFit fit;
  /// log(e_k / e_{k+1}) / log(h_k / h_{k+1}) for consecutive points.
  std::vector<double> local_orders;
};

struct ConvergenceReport {
  std::string problem;
  NormKind norm;
  int grid = 0;
  double final_time = 0.0;
  int ref_factor = 0;
  int reference_steps = 0;
  /// Norm of the difference between references at h_ref and h_ref / 2.
  double reference_gap = 0.0;
  /// Points below this error are excluded from the fit.
  double fit_floor = 0.0;
  std::vector<SchemeSeries> series;
  std::vector<double> guide_slopes;
  double wall_seconds = 0.0;

  const SchemeSeries* find(Scheme s) const;
  double smallest_error() const;
};

/// Least-squares slope of log(error) against log(h) over points with
/// error > floor. Throws TooFewPoints when fewer than three remain.
OrderFit fit_order(std::span<const Measurement> points, double floor = 0.0);

std::vector<double> local_orders(std::span<const Measurement> points);

/// Builds the operators once, computes the reference twice (h_ref and
/// h_ref / 2), measures every (scheme, h) end-time error and fits orders.
/// Throws ReferenceInconsistent when the reference gap is not below 10% of
/// the smallest measured error. Writes outputs when `out_dir` is set.
ConvergenceReport run_convergence_study(const StudyConfig& cfg);

/// report.csv: `scheme,h,error,norm,problem,grid,T`, 17 significant digits.
void emit_csv(const ConvergenceReport& report, const std::string& path);
void emit_json(const ConvergenceReport& report, const std::string& path);
void emit_svg_loglog(const ConvergenceReport& report, std::span<const double> guide_slopes,
                     const std::string& path);
std::string render_csv(const ConvergenceReport& report);
std::string render_json(const ConvergenceReport& report);
std::string render_svg_loglog(const ConvergenceReport& report, std::span<const double> guide_slopes);

/// Writes report.csv, report.json and (with cfg.plot) plot.svg into cfg.out_dir.
void write_outputs(const ConvergenceReport& report, const StudyConfig& cfg);

/// Writes `contents` to a temporary file next to `path`, then renames it.
void write_file_atomically(const std::string& path, const std::string& contents);

}  // namespace expsplit
