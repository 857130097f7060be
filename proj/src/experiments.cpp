#include "tactoid/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>

#include "tactoid/analysis.hpp"

namespace tactoid {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_config_echo(const RunConfig& cfg) {
  std::ofstream out(join(cfg.outputDir, "config.txt"));
  if (!out) throw IoError("cannot write '" + join(cfg.outputDir, "config.txt") + "'");
  out << to_text(cfg);
}

int final_iteration(const NIResult& ni) { return ni.stats.empty() ? 0 : ni.stats.back().iterations; }

void collect_outputs(const RunConfig& cfg, const MaterialParams& params, const NIResult& ni, RunOutput& out) {
  out.snapshots.clear();
  for (std::size_t i = 0; i < ni.levels.size(); ++i)
    out.snapshots.push_back(
        make_snapshot(ni.levels[i].mesh, ni.levels[i].field, params, static_cast<int>(i) + 1, ni.stats[i].iterations));
  if (!ni.levels.empty())
    out.snapshots.push_back(
        make_snapshot(ni.mesh, ni.field, params, static_cast<int>(ni.levels.size()), final_iteration(ni)));
  out.summary = summary_rows(ni.stats);
  if (!cfg.snapshots) return;
  for (std::size_t i = 0; i + 1 < out.snapshots.size(); ++i)
    write_snapshot(out.snapshots[i], join(cfg.outputDir, "level_" + std::to_string(i + 1) + ".vtk"));
  if (!out.snapshots.empty()) write_snapshot(out.snapshots.back(), join(cfg.outputDir, "final.vtk"));
}

void jitter(SimplicialMesh& mesh, std::mt19937_64& rng, double amount) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = std::pow(total_measure(mesh) / mesh.elementCount(), 1.0 / mesh.dimension);
  for (int attempt = 0; attempt < 100; ++attempt) {
    SimplicialMesh trial = mesh;
    for (Vec3& p : trial.vertices)
      for (int i = 0; i < mesh.dimension; ++i) p[i] += amount * h * u(rng);
    if (all_elements_positive(trial)) {
      mesh = std::move(trial);
      return;
    }
  }
}

double rel_linf(const std::vector<double>& a, const std::vector<double>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - ref[i]));
    den = std::max(den, std::abs(ref[i]));
  }
  return den > 0.0 ? num / den : num;
}

std::vector<double> concat(const GradientVector& g) {
  std::vector<double> v = g.xPart;
  v.insert(v.end(), g.qPart.begin(), g.qPart.end());
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Measurements measure(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params) {
  Measurements m;
  m.aspectRatio = aspect_ratio(mesh);
  m.defects = detect_defects(mesh, field, params.S0);
  m.alignment = boundary_alignment(mesh, field);
  const auto S = order_parameter(field);
  m.minS = S.empty() ? 0.0 : *std::min_element(S.begin(), S.end());
  return m;
}

SimplicialMesh initial_mesh(const RunConfig& cfg) {
  return cfg.dimension == 2 ? build_coarse_disc(cfg.material.targetMeasure) : build_ball(cfg.material.targetMeasure);
}

NodalQField initial_field(const SimplicialMesh& mesh, const MaterialParams& params) {
  return NodalQField::uniform(from_director(params.S0, Vec3::UnitX(), params.qmode()), mesh.vertexCount());
}

MaterialParams solve_params(const RunConfig& cfg) {
  MaterialParams p = cfg.material;
  if (cfg.problem == Problem::subproblemA) p.surfaceTension = false;
  return p;
}

RunOutput run_problem(const RunConfig& cfg) {
  set_assembly_options({cfg.threads});
  ensure_directory(cfg.outputDir);
  write_config_echo(cfg);
  const MaterialParams params = solve_params(cfg);
  const SimplicialMesh mesh = initial_mesh(cfg);
  RunOutput out;
  try {
    out.ni = ni_solve(mesh, initial_field(mesh, params), params, cfg.schedule());
  } catch (const SolveFailure& e) {
    collect_outputs(cfg, params, e.partial, out);
    write_summary(out.summary, join(cfg.outputDir, "summary.csv"));
    write_failure_marker(cfg.outputDir, "solver", e.what(),
                         {{"level", std::to_string(e.level)}, {"omega", fmt(e.omega)}});
    throw;
  }
  collect_outputs(cfg, params, out.ni, out);
  write_summary(out.summary, join(cfg.outputDir, "summary.csv"));
  out.final = measure(out.ni.mesh, out.ni.field, params);
  return out;
}

RunOutput run_full(const RunConfig& cfg) {
  if (cfg.problem != Problem::full) throw std::invalid_argument("run_full: configuration selects " + to_string(cfg.problem));
  return run_problem(cfg);
}

RunOutput run_subproblem(const RunConfig& cfg, Problem which) {
  if (which == Problem::full) throw std::invalid_argument("run_subproblem: expected subproblem-a or subproblem-b");
  RunConfig c = cfg;
  c.problem = which;
  return run_problem(c);
}

const char* const kSweepHeader =
    "omega,aspect_ratio,energy,defect_count,alignment,finest_iterations,abs_c,failed,message";

void write_sweep(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << std::setprecision(17) << kSweepHeader << "\n";
  for (const SweepRow& r : rows) {
    std::string msg = r.message;
    for (char& ch : msg)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    out << r.omega << "," << r.aspectRatio << "," << r.energy << "," << r.defectCount << "," << r.alignment << ","
        << r.finestIterations << "," << r.absC << "," << (r.failed ? 1 : 0) << "," << msg << "\n";
  }
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

SweepResult sweep_omega(const RunConfig& cfg, const std::vector<double>& omegas) {
  if (omegas.empty()) throw std::invalid_argument("sweep_omega: empty omega list");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (omegas[i] < 0.0) throw std::invalid_argument("sweep_omega: omega must be ≥ 0");
    if (i > 0 && !(omegas[i] > omegas[i - 1])) throw std::invalid_argument("sweep_omega: omegas must increase");
  }
  set_assembly_options({cfg.threads});
  ensure_directory(cfg.outputDir);
  write_config_echo(cfg);
  MaterialParams params = solve_params(cfg);
  const SimplicialMesh mesh0 = initial_mesh(cfg);
  SweepResult result;
  int previous = -1;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    params.omega = omegas[i];
    SweepRow row;
    row.omega = omegas[i];
    NISchedule schedule = cfg.schedule();
    try {
      NIResult ni;
      if (previous < 0) {
        ni = ni_solve(mesh0, initial_field(mesh0, params), params, schedule);
      } else if (cfg.multiLevelContinuation) {
        ni = multilevel_continuation(result.runs[previous].levels, params, schedule);
      } else {
        schedule.omegaContinuation.clear();
        const LevelState& seed = result.runs[previous].levels.front();
        ni = ni_solve(seed.mesh, seed.field, params, schedule, seed.lambda);
      }
      const Measurements m = measure(ni.mesh, ni.field, params);
      row.aspectRatio = m.aspectRatio;
      row.energy = ni.stats.back().energy;
      row.defectCount = static_cast<int>(m.defects.size());
      row.alignment = m.alignment;
      row.finestIterations = ni.stats.back().iterations;
      row.absC = ni.stats.back().absC;
      if (cfg.snapshots)
        write_snapshot(make_snapshot(ni.mesh, ni.field, params, schedule.levelCount, row.finestIterations),
                       join(cfg.outputDir, "omega_" + std::to_string(i + 1) + ".vtk"));
      result.runs.push_back(std::move(ni));
      previous = static_cast<int>(i);
    } catch (const SolveFailure& e) {
      row.failed = true;
      row.message = e.what();
      result.runs.emplace_back();
    }
    result.rows.push_back(row);
  }
  write_sweep(result.rows, join(cfg.outputDir, "sweep.csv"));
  bool anyFailed = false;
  for (const auto& r : result.rows) anyFailed = anyFailed || r.failed;
  if (anyFailed) {
    std::string which;
    for (const auto& r : result.rows)
      if (r.failed) which += (which.empty() ? "" : ",") + fmt(r.omega);
    write_failure_marker(cfg.outputDir, "sweep", "solver failure at omega " + which, {{"omegas", which}});
  }
  return result;
}

GradientReport check_gradients(const RunConfig& cfg) {
  constexpr double h = 1e-6;
  constexpr double limit = 1e-5;
  set_assembly_options({cfg.threads});
  const MaterialParams params = solve_params(cfg);
  std::mt19937_64 rng(cfg.seed);
  SimplicialMesh mesh = initial_mesh(cfg);
  jitter(mesh, rng, 0.1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  NodalQField field(params.qmode(), mesh.vertexCount());
  for (double& v : field.values()) v = u(rng);

  GradientReport r;
  const GradientVector g = grad(mesh, field, params);
  const GradientVector fd = fd_gradient(mesh, field, params, h);
  r.dof = static_cast<int>(g.xPart.size() + g.qPart.size());
  r.maxRelX = rel_linf(g.xPart, fd.xPart);
  r.maxRelQ = rel_linf(g.qPart, fd.qPart);
  r.maxRelTotal = rel_linf(concat(g), concat(fd));
  r.constraintRel = rel_linf(constraint_grad(mesh), fd_constraint_grad(mesh, h));
  // tangential anchoring has no 3D frame, so the comparison is 2D only
  if (params.omega == 0.0 && mesh.dimension == 2) {
    MaterialParams flipped = params;
    flipped.anchoring = params.anchoring == Anchoring::tangential ? Anchoring::normal : Anchoring::tangential;
    const GradientVector gf = grad(mesh, field, flipped);
    r.anchoringBlockZero = gf.xPart == g.xPart && gf.qPart == g.qPart;
  }
  r.pass = r.maxRelTotal <= limit && r.constraintRel <= limit && r.anchoringBlockZero;
  return r;
}

}  // namespace tactoid
