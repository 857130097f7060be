// Command-line driver: run, suba, subb, sweep, checkgrad.

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>

#include "tactoid/experiments.hpp"

using namespace tactoid;

namespace {

enum Exit { ok = 0, solverFailed = 1, badConfig = 2, ioFailed = 3, gradientFailed = 4, internal = 5 };

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  bool deterministic = false;
  std::string omegas;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "configuration file")->required();
  sub->add_option("--out", o.out, "output directory (overrides run.output)");
  sub->add_option("--threads", o.threads, "assembly threads (overrides run.threads)")->check(CLI::PositiveNumber);
  sub->add_flag("--deterministic", o.deterministic, "fixed-order reductions");
}

RunConfig load(const Options& o) {
  RunConfig cfg = parse_config(o.config);
  if (!o.out.empty()) cfg.outputDir = o.out;
  if (o.threads > 0) cfg.threads = o.threads;
  if (o.deterministic) cfg.deterministic = true;
  return cfg;
}

void print_run(const RunOutput& r) {
  std::cout << std::setprecision(10);
  std::cout << "level  vertices  iterations  energy            |C|\n";
  for (const auto& s : r.ni.stats)
    std::cout << std::setw(5) << s.level << std::setw(10) << s.vertexCount << std::setw(12) << s.iterations << "  "
              << std::setw(16) << s.energy << "  " << s.absC << "\n";
  std::cout << "aspect ratio " << r.final.aspectRatio << ", defects " << r.final.defects.size()
            << ", boundary alignment " << r.final.alignment << ", min S " << r.final.minS << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium shapes and order of nematic tactoids"};
  app.require_subcommand(1);
  Options o;
  CLI::App* run = app.add_subcommand("run", "full problem with nested iteration");
  CLI::App* suba = app.add_subcommand("suba", "fixed shape, free field");
  CLI::App* subb = app.add_subcommand("subb", "fixed field, free shape");
  CLI::App* sweep = app.add_subcommand("sweep", "omega sweep with continuation");
  CLI::App* checkgrad = app.add_subcommand("checkgrad", "analytic against finite-difference gradients");
  for (CLI::App* s : {run, suba, subb, sweep, checkgrad}) add_common(s, o);
  sweep->add_option("--omegas", o.omegas, "comma-separated omegas (overrides sweep.omegas)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return ok;
    try {
      write_failure_marker(o.out.empty() ? "out" : o.out, "usage", e.what());
    } catch (...) {
    }
    return badConfig;
  }

  std::string outDir = o.out.empty() ? "out" : o.out;
  try {
    RunConfig cfg = load(o);
    outDir = cfg.outputDir;
    if (run->parsed()) {
      RunConfig c = cfg;
      c.problem = Problem::full;
      print_run(run_full(c));
    } else if (suba->parsed()) {
      print_run(run_subproblem(cfg, Problem::subproblemA));
    } else if (subb->parsed()) {
      print_run(run_subproblem(cfg, Problem::subproblemB));
    } else if (sweep->parsed()) {
      std::vector<double> omegas = cfg.sweepOmegas;
      if (!o.omegas.empty()) omegas = parse_config_text("sweep.omegas=" + o.omegas).sweepOmegas;
      if (omegas.empty()) throw ConfigError("sweep.omegas: no omega values given");
      const SweepResult r = sweep_omega(cfg, omegas);
      std::cout << std::setprecision(10) << kSweepHeader << "\n";
      bool failed = false;
      for (const auto& row : r.rows) {
        std::cout << row.omega << "," << row.aspectRatio << "," << row.energy << "," << row.defectCount << ","
                  << row.alignment << "," << row.finestIterations << "," << row.absC << "," << row.failed << "\n";
        failed = failed || row.failed;
      }
      if (failed) return solverFailed;
    } else if (checkgrad->parsed()) {
      const GradientReport g = check_gradients(cfg);
      std::cout << std::setprecision(3) << std::scientific << "dof " << g.dof << "\n"
                << "max relative error, positions " << g.maxRelX << "\n"
                << "max relative error, field     " << g.maxRelQ << "\n"
                << "max relative error, all       " << g.maxRelTotal << "\n"
                << "max relative error, constraint " << g.constraintRel << "\n";
      if (cfg.material.omega == 0.0 && cfg.dimension == 2)
        std::cout << "anchoring block zero " << (g.anchoringBlockZero ? "yes" : "no") << "\n";
      if (!g.pass) {
        write_failure_marker(outDir, "gradient", "finite-difference mismatch above 1e-5");
        return gradientFailed;
      }
    }
    return ok;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    try {
      write_failure_marker(outDir, "config", e.what(), {{"line", std::to_string(e.line)}});
    } catch (...) {
    }
    return badConfig;
  } catch (const SolveFailure& e) {
    // run_problem has written the partial outputs and the marker
    std::cerr << "solver failure: " << e.what() << "\n";
    return solverFailed;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    try {
      write_failure_marker(outDir, "io", e.what());
    } catch (...) {
    }
    return ioFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    try {
      write_failure_marker(outDir, "internal", e.what());
    } catch (...) {
    }
    return internal;
  }
}
