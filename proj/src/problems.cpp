#include "expsplit/problems.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "expsplit/error.hpp"

namespace expsplit {

std::string_view to_string(Formulation f) noexcept {
  switch (f) {
    case Formulation::Standard: return "standard";
    case Formulation::HomogenizedBc: return "homogenized";
    case Formulation::ExtrapolationBc: return "extrapolation";
  }
  return "unknown";
}

TimeProfile::TimeProfile(std::vector<Function> derivatives) : slots_(std::move(derivatives)) {
  if (slots_.empty() || !slots_.front()) {
    throw Error(ErrorCode::InvalidArgument, "TimeProfile: value function required");
  }
  if (slots_.size() > kMaxDerivative + 1) slots_.resize(kMaxDerivative + 1);
}

TimeProfile TimeProfile::constant(double c) {
  const auto zero = [](double) { return 0.0; };
  return TimeProfile({[c](double) { return c; }, zero, zero, zero});
}

TimeProfile TimeProfile::linear(double c) {
  const auto zero = [](double) { return 0.0; };
  return TimeProfile({[c](double t) { return c * t; }, [c](double) { return c; }, zero, zero});
}

TimeProfile TimeProfile::exponential(double c) {
  const auto f = [c](double t) { return c * std::exp(t); };
  return TimeProfile({f, f, f, f});
}

bool TimeProfile::has_derivative(int k) const noexcept {
  return k >= 0 && static_cast<std::size_t>(k) < slots_.size() &&
         static_cast<bool>(slots_[static_cast<std::size_t>(k)]);
}

double TimeProfile::derivative(int k, double t) const {
  if (!has_derivative(k)) {
    throw Error(ErrorCode::MissingDerivative,
                "time derivative of order " + std::to_string(k) + " is not available");
  }
  return slots_[static_cast<std::size_t>(k)](t);
}

TimeProfile TimeProfile::differentiated() const {
  if (!has_derivative(1)) {
    throw Error(ErrorCode::MissingDerivative, "TimeProfile::differentiated: no first derivative");
  }
  return TimeProfile(std::vector<Function>(slots_.begin() + 1, slots_.end()));
}

TimeProfile TimeProfile::scaled(double s) const {
  std::vector<Function> out;
  out.reserve(slots_.size());
  for (const auto& f : slots_) {
    if (f) {
      out.emplace_back([f, s](double t) { return s * f(t); });
    } else {
      out.emplace_back();
    }
  }
  return TimeProfile(std::move(out));
}

SourceTerm SourceTerm::from_field(TimeProfile time, ScalarField s) {
  return SourceTerm{std::move(time),
                    [s](const Discretization& disc) { return GridFunction::sample(disc.grid(), s); },
                    s};
}

LiftTerm LiftTerm::from_field(TimeProfile time, ScalarField s) {
  return LiftTerm{std::move(time),
                  [s](const Discretization& disc) { return GridFunction::sample(disc.grid(), s); },
                  s, {}};
}

LiftTerm LiftTerm::discrete_harmonic(TimeProfile time, ScalarField f) {
  return LiftTerm{std::move(time),
                  [f](const Discretization& disc) { return dirichlet_lift(disc, f); }, f, {}};
}

GridFunction ProblemSpec::initial_value(const Discretization& disc) const {
  if (!initial) throw Error(ErrorCode::InvalidArgument, label + ": no initial value");
  GridFunction u0 = initial(disc);
  check_same_grid(disc.grid(), u0.grid(), "ProblemSpec::initial_value");
  return u0;
}

bool ProblemSpec::has_source_derivative(int k) const noexcept {
  for (const auto& term : sources) {
    if (!term.time.has_derivative(k)) return false;
  }
  return true;
}

GridFunction ProblemSpec::source(double t, const Discretization& disc, int k) const {
  GridFunction g(disc.grid());
  for (const auto& term : sources) g.axpy(term.time.derivative(k, t), term.spatial(disc));
  return g;
}

double ProblemSpec::source_pointwise(double t, double x, double y, int k) const {
  double acc = 0.0;
  for (const auto& term : sources) {
    if (!term.pointwise) {
      throw Error(ErrorCode::InvalidArgument, label + ": source term has no pointwise evaluator");
    }
    acc += term.time.derivative(k, t) * term.pointwise(x, y);
  }
  return acc;
}

GridFunction ProblemSpec::recover(double t, const GridFunction& u, const Discretization& disc) const {
  GridFunction w = u;
  for (const auto& term : lift) w.axpy(term.time(t), term.interior(disc));
  return w;
}

SampledSource::SampledSource(const ProblemSpec& problem, const Discretization& disc)
    : grid_(disc.grid()) {
  shapes_.reserve(problem.sources.size());
  profiles_.reserve(problem.sources.size());
  for (const auto& term : problem.sources) {
    GridFunction s = term.spatial(disc);
    check_same_grid(grid_, s.grid(), "SampledSource");
    shapes_.push_back(std::move(s));
    profiles_.push_back(term.time);
  }
}

GridFunction SampledSource::at(double t, int derivative) const {
  GridFunction out(grid_);
  evaluate(t, derivative, out);
  return out;
}

void SampledSource::evaluate(double t, int derivative, GridFunction& out) const {
  check_same_grid(grid_, out.grid(), "SampledSource::evaluate");
  std::fill(out.values().begin(), out.values().end(), 0.0);
  for (std::size_t k = 0; k < shapes_.size(); ++k) {
    out.axpy(profiles_[k].derivative(derivative, t), shapes_[k]);
  }
}

double bump(double x, double y) {
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) return 0.0;
  return std::exp(8.0 - 1.0 / (x * (1.0 - x)) - 1.0 / (y * (1.0 - y)));
}

CoefficientField example_coefficients() {
  return CoefficientField([](double x, double y) { return 2.0 * x * y + 3.0; },
                          [](double x, double y) { return 2.0 * x * std::pow(y, 4) + 1.0; });
}

namespace {

double quartic_bubble(double x, double y) { return x * (1.0 - x) * y * (1.0 - y); }

SpatialSampler sampled(ScalarField f) {
  return [f = std::move(f)](const Discretization& disc) {
    return GridFunction::sample(disc.grid(), f);
  };
}

}  // namespace

ProblemSpec example_order_reduction() {
  ProblemSpec p{.label = "example1",
                .coefficients = example_coefficients(),
                .initial = sampled(bump),
                .sources = {},
                .formulation = Formulation::Standard,
                .g_vanishes_on_boundary = false,
                .lift = {},
                .boundary_trace = {}};
  p.sources.push_back(SourceTerm::from_field(TimeProfile::constant(1.0), quartic_bubble));
  p.sources.push_back(SourceTerm::from_field(
      TimeProfile::linear(1.0), [](double x, double y) { return std::exp(x * x * x * y); }));
  return p;
}

ProblemSpec example_full_order() {
  ProblemSpec p{.label = "example2",
                .coefficients = example_coefficients(),
                .initial = sampled(bump),
                .sources = {},
                .formulation = Formulation::Standard,
                .g_vanishes_on_boundary = true,
                .lift = {},
                .boundary_trace = {}};
  p.sources.push_back(SourceTerm::from_field(TimeProfile::exponential(1.0), quartic_bubble));
  return p;
}

ProblemSpec example_inhomogeneous_bc() {
  const ScalarField one = [](double, double) { return 1.0; };
  ProblemSpec p{.label = "example3",
                .coefficients = example_coefficients(),
                .initial = sampled(bump),
                .sources = {},
                .formulation = Formulation::ExtrapolationBc,
                .g_vanishes_on_boundary = false,
                .lift = {},
                .boundary_trace = one};
  p.sources.push_back(SourceTerm{
      TimeProfile::constant(1.0),
      [one](const Discretization& disc) { return boundary_coupling_vector(disc.a(), disc.b(), one); },
      {}});
  return p;
}

GridFunction dirichlet_lift(const Discretization& disc, const ScalarField& f) {
  GridFunction rhs = boundary_coupling_vector(disc.a(), disc.b(), f);
  rhs *= -1.0;
  return GridFunction(disc.grid(), cg_solve(disc.full_operator(), rhs.values()));
}

namespace {

GridFunction apply_extended(const Discretization& disc, const GridFunction& interior,
                            const ScalarField& trace) {
  GridFunction out = apply_split_operator(disc.a(), interior);
  out += apply_split_operator(disc.b(), interior);
  out += boundary_coupling_vector(disc.a(), disc.b(), trace);
  return out;
}

}  // namespace

ProblemSpec homogenize(const ProblemSpec& problem, std::vector<LiftTerm> lift) {
  ProblemSpec out = problem;
  out.formulation = Formulation::HomogenizedBc;
  out.g_vanishes_on_boundary = false;
  for (const auto& term : lift) {
    if (!term.time.has_derivative(1)) {
      throw Error(ErrorCode::MissingLiftDerivative, problem.label + ": lift has no time derivative");
    }
    if (!term.interior || (!term.applied && !term.trace)) {
      throw Error(ErrorCode::InvalidArgument,
                  problem.label + ": lift term needs interior values and a trace or L F");
    }
    SpatialSampler applied = term.applied;
    if (!applied) {
      applied = [interior = term.interior, trace = term.trace](const Discretization& disc) {
        return apply_extended(disc, interior(disc), trace);
      };
    }
    out.sources.push_back(SourceTerm{term.time, applied, {}});
    out.sources.push_back(SourceTerm{term.time.differentiated().scaled(-1.0), term.interior, {}});
  }

  const SpatialSampler base_initial = problem.initial;
  out.initial = [base_initial, lift](const Discretization& disc) {
    GridFunction u0 = base_initial(disc);
    for (const auto& term : lift) u0.axpy(-term.time(0.0), term.interior(disc));
    return u0;
  };
  out.lift.insert(out.lift.end(), lift.begin(), lift.end());
  return out;
}

namespace {

ProblemSpec manufactured(std::string_view name) {
  const std::string label = "manufactured:" + std::string(name);
  using std::numbers::pi;
  if (name == "heat") {
    return ProblemSpec{.label = label,
                       .coefficients = CoefficientField::constant(1.0, 1.0),
                       .initial = sampled([](double x, double y) {
                         return std::sin(pi * x) * std::sin(pi * y);
                       }),
                       .sources = {},
                       .formulation = Formulation::Standard,
                       .g_vanishes_on_boundary = true,
                       .lift = {},
                       .boundary_trace = {}};
  }
  if (name == "harmonic") {
    const ScalarField f = [](double x, double y) { return x * x - y * y; };
    ProblemSpec base{.label = label,
                     .coefficients = CoefficientField::constant(1.0, 1.0),
                     .initial = sampled(f),
                     .sources = {},
                     .formulation = Formulation::Standard,
                     .g_vanishes_on_boundary = true,
                     .lift = {},
                     .boundary_trace = f};
    return homogenize(base, {LiftTerm::from_field(TimeProfile::constant(1.0), f)});
  }
  if (name == "ramp") {
    ProblemSpec base{.label = label,
                     .coefficients = example_coefficients(),
                     .initial = sampled(bump),
                     .sources = {},
                     .formulation = Formulation::Standard,
                     .g_vanishes_on_boundary = true,
                     .lift = {},
                     .boundary_trace = {}};
    return homogenize(base, {LiftTerm::from_field(TimeProfile::linear(1.0),
                                                  [](double, double) { return 1.0; })});
  }
  if (name == "example3-homogenized") {
    const ScalarField one = [](double, double) { return 1.0; };
    ProblemSpec base{.label = label,
                     .coefficients = example_coefficients(),
                     .initial = sampled(bump),
                     .sources = {},
                     .formulation = Formulation::Standard,
                     .g_vanishes_on_boundary = true,
                     .lift = {},
                     .boundary_trace = one};
    return homogenize(base, {LiftTerm::discrete_harmonic(TimeProfile::constant(1.0), one)});
  }
  throw Error(ErrorCode::UnknownProblem, "unknown manufactured problem '" + std::string(name) + "'");
}

}  // namespace

ProblemSpec problem_by_label(std::string_view label) {
  if (label == "example1") return example_order_reduction();
  if (label == "example2") return example_full_order();
  if (label == "example3") return example_inhomogeneous_bc();
  constexpr std::string_view prefix = "manufactured:";
  if (label.starts_with(prefix)) return manufactured(label.substr(prefix.size()));
  throw Error(ErrorCode::UnknownProblem, "unknown problem '" + std::string(label) + "'");
}

std::vector<std::string> problem_labels() {
  return {"example1",           "example2",          "example3",
          "manufactured:heat",  "manufactured:harmonic", "manufactured:ramp",
          "manufactured:example3-homogenized"};
}

}  // namespace expsplit
