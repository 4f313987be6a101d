#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "expsplit/error.hpp"
#include "expsplit/harness.hpp"
#include "expsplit/verification.hpp"

using namespace expsplit;

namespace {

struct RunFlags {
  std::string config;
  std::string problem;
  std::string schemes;
  std::string norm;
  int grid = 0;
  double final_time = 0.0;
  int kmin = 0;
  int kmax = 0;
  int ref_factor = 0;
  std::string out;
  bool plot = false;
  int threads = 0;
  std::vector<double> slopes;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int print_report(const ConvergenceReport& r) {
  std::printf("%s  norm=%s  grid=%d  T=%g  reference=%d steps (gap %.3e)\n", r.problem.c_str(),
              r.norm.name().c_str(), r.grid, r.final_time, r.reference_steps, r.reference_gap);
  for (const auto& s : r.series) {
    const std::string name(to_string(s.scheme));
    std::printf("%-8s order %.3f  (residual %.2e, %zu points)\n", name.c_str(), s.fit.order,
                s.fit.residual, s.fit.points_used);
    for (const auto& p : s.points) std::printf("    h=%-12.6g error=%.6e\n", p.h, p.error);
  }
  std::printf("wall %.2fs\n", r.wall_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential splitting convergence studies"};
  app.require_subcommand(1);

  RunFlags f;
  auto* run = app.add_subcommand("run", "Run a convergence study");
  run->add_option("--config", f.config, "JSON file with keys mirroring the flags");
  auto* o_problem = run->add_option("--problem", f.problem, "example1|example2|example3|manufactured:<name>");
  auto* o_schemes = run->add_option("--schemes", f.schemes, "comma list of lie,strang,strangb");
  auto* o_norm = run->add_option("--norm", f.norm, "l2|dual|frac:<gamma>");
  auto* o_grid = run->add_option("--grid", f.grid, "interior nodes per direction");
  auto* o_T = run->add_option("--T", f.final_time, "final time");
  auto* o_kmin = run->add_option("--kmin", f.kmin, "coarsest step h = T/2^kmin");
  auto* o_kmax = run->add_option("--kmax", f.kmax, "finest step h = T/2^kmax");
  auto* o_ref = run->add_option("--ref-factor", f.ref_factor, "reference steps = 2^kmax * factor");
  auto* o_out = run->add_option("--out", f.out, "output directory");
  auto* o_plot = run->add_flag("--plot", f.plot, "write plot.svg");
  auto* o_threads = run->add_option("--threads", f.threads, "worker threads");
  auto* o_slopes = run->add_option("--slopes", f.slopes, "guide slopes for the plot");

  auto* verify = app.add_subcommand("verify", "Run oracle checks on tiny grids");
  std::uint64_t seed = 7;
  verify->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const auto checks = run_verification(seed);
      int failed = 0;
      for (const auto& c : checks) {
        std::printf("%s %-32s %.3e (tol %.0e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.tolerance);
        if (!c.passed) ++failed;
      }
      std::printf("%zu checks, %d failed\n", checks.size(), failed);
      return failed == 0 ? 0 : 1;
    }

    StudyConfig cfg;
    if (!f.config.empty()) cfg = apply_json_config(cfg, read_file(f.config));
    if (o_problem->count()) cfg.problem = f.problem;
    if (o_schemes->count()) cfg.schemes = parse_scheme_list(f.schemes);
    if (o_norm->count()) cfg.norm = NormKind::parse(f.norm);
    if (o_grid->count()) cfg.grid = f.grid;
    if (o_T->count()) cfg.final_time = f.final_time;
    if (o_kmin->count()) cfg.kmin = f.kmin;
    if (o_kmax->count()) cfg.kmax = f.kmax;
    if (o_ref->count()) cfg.ref_factor = f.ref_factor;
    if (o_out->count()) cfg.out_dir = f.out;
    if (o_plot->count()) cfg.plot = f.plot;
    if (o_threads->count()) cfg.threads = f.threads;
    if (o_slopes->count()) cfg.guide_slopes = f.slopes;
    return print_report(run_convergence_study(cfg));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "expsplit: %s\n", e.what());
    return 2;
  }
}
