#include "expsplit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "expsplit/error.hpp"

namespace expsplit {

using nlohmann::json;

StudyConfig StudyConfig::ci_profile(std::string problem) {
  StudyConfig cfg;
  cfg.problem = std::move(problem);
  cfg.grid = 31;
  cfg.kmin = 3;
  cfg.kmax = 8;
  return cfg;
}

std::vector<double> StudyConfig::step_sizes() const {
  std::vector<double> out;
  for (int k = kmin; k <= kmax; ++k) out.push_back(std::ldexp(final_time, -k));
  return out;
}

int StudyConfig::reference_steps() const { return (1 << kmax) * ref_factor; }

void StudyConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (schemes.empty()) fail("at least one scheme is required");
  if (grid < 1) fail("grid must be >= 1");
  if (!(final_time > 0.0)) fail("T must be > 0");
  if (kmin < 0 || kmax < kmin) fail("need 0 <= kmin <= kmax");
  if (kmax > 20) fail("kmax must be <= 20");
  if (ref_factor < 8) fail("reference refinement factor must be >= 8");
  if (static_cast<long long>(1 << kmax) * ref_factor * 2 > (1LL << 30)) {
    fail("reference step count too large");
  }
  if (threads < 1) fail("threads must be >= 1");
  const auto n = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
  if (n > kDefaultDenseEigenCap) {
    throw Error(ErrorCode::DimensionCapExceeded,
                "grid " + std::to_string(grid) + " exceeds the dense eigensolver cap");
  }
}

std::vector<double> StudyConfig::effective_guide_slopes() const {
  if (!guide_slopes.empty()) return guide_slopes;
  if (norm.tag == NormKind::Tag::Dual) return {1.0, 2.0};
  if (problem == "example1") return {1.0, 1.25};
  if (problem == "example3") return {0.25};
  return {1.0, 2.0};
}

StudyConfig apply_json_config(const StudyConfig& base, std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config: expected a JSON object");
  StudyConfig cfg = base;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "problem") {
        cfg.problem = value.get<std::string>();
      } else if (key == "schemes") {
        if (value.is_array()) {
          std::string joined;
          for (const auto& s : value) joined += s.get<std::string>() + ",";
          cfg.schemes = parse_scheme_list(joined);
        } else {
          cfg.schemes = parse_scheme_list(value.get<std::string>());
        }
      } else if (key == "norm") {
        cfg.norm = NormKind::parse(value.get<std::string>());
      } else if (key == "grid") {
        cfg.grid = value.get<int>();
      } else if (key == "T") {
        cfg.final_time = value.get<double>();
      } else if (key == "kmin") {
        cfg.kmin = value.get<int>();
      } else if (key == "kmax") {
        cfg.kmax = value.get<int>();
      } else if (key == "ref-factor" || key == "ref_factor") {
        cfg.ref_factor = value.get<int>();
      } else if (key == "out") {
        cfg.out_dir = value.get<std::string>();
      } else if (key == "plot") {
        cfg.plot = value.get<bool>();
      } else if (key == "threads") {
        cfg.threads = value.get<int>();
      } else if (key == "slopes") {
        cfg.guide_slopes = value.get<std::vector<double>>();
      } else {
        throw Error(ErrorCode::InvalidArgument, "config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  return cfg;
}

const SchemeSeries* ConvergenceReport::find(Scheme s) const {
  for (const auto& series_item : series) {
    if (series_item.scheme == s) return &series_item;
  }
  return nullptr;
}

double ConvergenceReport::smallest_error() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (const auto& p : s.points) m = std::min(m, p.error);
  }
  return m;
}

OrderFit fit_order(std::span<const Measurement> points, double floor) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : points) {
    if (p.error > floor && p.error > 0.0 && p.h > 0.0) {
      xs.push_back(std::log(p.h));
      ys.push_back(std::log(p.error));
    }
  }
  if (xs.size() < 3) {
    throw Error(ErrorCode::TooFewPoints,
                "fit_order: " + std::to_string(xs.size()) + " usable points, need 3");
  }
  const auto m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::TooFewPoints, "fit_order: all step sizes are equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = ys[i] - (intercept + slope * xs[i]);
    ss += d * d;
  }
  return {slope, std::sqrt(ss / m), xs.size()};
}

std::vector<double> local_orders(std::span<const Measurement> points) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    out.push_back(std::log(points[i].error / points[i + 1].error) /
                  std::log(points[i].h / points[i + 1].h));
  }
  return out;
}

namespace {

// Runs fn(task) for task in [0, count) on `threads` workers; each task writes
// only its own result slot, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t t = 0; t < count; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t t = next++; t < count; t = next++) {
        try {
          fn(t);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ConvergenceReport run_convergence_study(const StudyConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const ProblemSpec problem = problem_by_label(cfg.problem);
  const Discretization disc = problem.discretize(Grid::square(cfg.grid));
  const DiscreteOperator& op = disc.full_operator();
  op.decomposition();

  const int ref_steps = cfg.reference_steps();
  const GridFunction ref_coarse = reference_solve(disc, problem, TimeGrid(cfg.final_time, ref_steps));
  const GridFunction reference =
      reference_solve(disc, problem, TimeGrid(cfg.final_time, 2 * ref_steps));

  ConvergenceReport report;
  report.problem = cfg.problem;
  report.norm = cfg.norm;
  report.grid = cfg.grid;
  report.final_time = cfg.final_time;
  report.ref_factor = cfg.ref_factor;
  report.reference_steps = 2 * ref_steps;
  report.reference_gap = measure(cfg.norm, op, ref_coarse - reference);
  report.fit_floor = 100.0 * report.reference_gap;
  report.guide_slopes = cfg.effective_guide_slopes();

  const auto steps = cfg.step_sizes();
  const std::size_t per_scheme = steps.size();
  std::vector<double> errors(cfg.schemes.size() * per_scheme, 0.0);
  parallel_for(errors.size(), cfg.threads, [&](std::size_t task) {
    const Scheme scheme = cfg.schemes[task / per_scheme];
    const int k = cfg.kmin + static_cast<int>(task % per_scheme);
    const GridFunction u = integrate(scheme, disc, problem, TimeGrid(cfg.final_time, 1 << k));
    errors[task] = measure(cfg.norm, op, u - reference);
  });

  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    SchemeSeries series;
    series.scheme = cfg.schemes[s];
    for (std::size_t k = 0; k < per_scheme; ++k) {
      series.points.push_back({steps[k], errors[s * per_scheme + k]});
    }
    series.local_orders = local_orders(series.points);
    report.series.push_back(std::move(series));
  }

  const double smallest = report.smallest_error();
  if (!(report.reference_gap < 0.1 * smallest)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "reference gap %.3e is not below 10%% of the smallest measured error %.3e",
                  report.reference_gap, smallest);
    throw Error(ErrorCode::ReferenceInconsistent, msg);
  }
  for (auto& series : report.series) series.fit = fit_order(series.points, report.fit_floor);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!cfg.out_dir.empty()) write_outputs(report, cfg);
  return report;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string render_csv(const ConvergenceReport& report) {
  std::string out = "scheme,h,error,norm,problem,grid,T\n";
  for (const auto& series : report.series) {
    for (const auto& p : series.points) {
      out += std::string(to_string(series.scheme)) + "," + format_double(p.h) + "," +
             format_double(p.error) + "," + report.norm.name() + "," + report.problem + "," +
             std::to_string(report.grid) + "," + format_double(report.final_time) + "\n";
    }
  }
  return out;
}

std::string render_json(const ConvergenceReport& report) {
  json j;
  j["problem"] = report.problem;
  j["norm"] = report.norm.name();
  j["grid"] = report.grid;
  j["T"] = report.final_time;
  j["ref_factor"] = report.ref_factor;
  j["reference_steps"] = report.reference_steps;
  j["reference_gap"] = report.reference_gap;
  j["fit_floor"] = report.fit_floor;
  j["guide_slopes"] = report.guide_slopes;
  j["wall_seconds"] = report.wall_seconds;
  j["schemes"] = json::array();
  for (const auto& series : report.series) {
    json s;
    s["scheme"] = to_string(series.scheme);
    s["order"] = series.fit.order;
    s["fit_residual"] = series.fit.residual;
    s["points_used"] = series.fit.points_used;
    s["local_orders"] = series.local_orders;
    s["points"] = json::array();
    for (const auto& p : series.points) s["points"].push_back({{"h", p.h}, {"error", p.error}});
    j["schemes"].push_back(std::move(s));
  }
  return j.dump(2) + "\n";
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::Io, "rename to " + target.string() + " failed: " + ec.message());
}

void emit_csv(const ConvergenceReport& report, const std::string& path) {
  write_file_atomically(path, render_csv(report));
}

void emit_json(const ConvergenceReport& report, const std::string& path) {
  write_file_atomically(path, render_json(report));
}

void emit_svg_loglog(const ConvergenceReport& report, std::span<const double> guide_slopes,
                     const std::string& path) {
  write_file_atomically(path, render_svg_loglog(report, guide_slopes));
}

void write_outputs(const ConvergenceReport& report, const StudyConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + cfg.out_dir + ": " + ec.message());
  const fs::path dir(cfg.out_dir);
  emit_csv(report, (dir / "report.csv").string());
  emit_json(report, (dir / "report.json").string());
  if (cfg.plot) emit_svg_loglog(report, report.guide_slopes, (dir / "plot.svg").string());
}

}  // namespace expsplit
