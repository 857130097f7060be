#pragma once

#include <string>
#include <vector>

#include "tactoid/config.hpp"
#include "tactoid/io.hpp"

namespace tactoid {

struct Measurements {
  double aspectRatio = 1.0;
  std::vector<Vec3> defects;
  double alignment = 0.0;
  double minS = 0.0;
};

Measurements measure(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params);

/// Coarse disc (2D) or ball (3D) at the configured target measure.
SimplicialMesh initial_mesh(const RunConfig& cfg);
/// Uniform from_director(S0, x) on every vertex.
NodalQField initial_field(const SimplicialMesh& mesh, const MaterialParams& params);

/// Solver parameters of a run: Subproblem A drops the isotropic surface term,
/// which is constant for a fixed shape.
MaterialParams solve_params(const RunConfig& cfg);

struct RunOutput {
  NIResult ni;
  std::vector<Snapshot> snapshots;  // one per level, then the final state
  std::vector<SummaryRow> summary;
  Measurements final;
};

/// Runs nested iteration for cfg.problem and writes level_<k>.vtk, final.vtk
/// (when snapshots are on), summary.csv and config.txt to cfg.outputDir. On a
/// solver failure the completed levels are written together with
/// failure.marker and the SolveFailure is rethrown.
RunOutput run_problem(const RunConfig& cfg);
/// run_problem for a full-mask configuration; throws std::invalid_argument otherwise.
RunOutput run_full(const RunConfig& cfg);
/// run_problem with the mask of `which` (subproblemA or subproblemB).
RunOutput run_subproblem(const RunConfig& cfg, Problem which);

struct SweepRow {
  double omega = 0.0;
  double aspectRatio = 0.0;
  double energy = 0.0;
  int defectCount = 0;
  double alignment = 0.0;
  int finestIterations = 0;
  double absC = 0.0;
  bool failed = false;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<NIResult> runs;  // empty NIResult for failed omegas
};

/// One nested-iteration run per omega (strictly increasing). Each run after the
/// first is seeded on the coarse level with the previous converged coarse
/// state; with multiLevelContinuation every level is seeded by averaging.
/// A failing omega is recorded with failed = true and the sweep continues
/// from the last successful state. Writes sweep.csv to cfg.outputDir.
SweepResult sweep_omega(const RunConfig& cfg, const std::vector<double>& omegas);

extern const char* const kSweepHeader;
void write_sweep(const std::vector<SweepRow>& rows, const std::string& path);

struct GradientReport {
  double maxRelX = 0.0;
  double maxRelQ = 0.0;
  double maxRelTotal = 0.0;
  double constraintRel = 0.0;
  /// ω = 0 only: the anchoring mode has no effect on the gradient.
  bool anchoringBlockZero = true;
  int dof = 0;
  bool pass = false;
};

/// Analytic against central-difference gradients (h = 1e-6) on a jittered
/// coarse mesh with a random field drawn from cfg.seed. Passes when every
/// relative l-infinity error is at most 1e-5.
GradientReport check_gradients(const RunConfig& cfg);

}  // namespace tactoid
