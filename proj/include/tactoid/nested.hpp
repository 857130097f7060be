#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tactoid/optim.hpp"

namespace tactoid {

enum class SolverKind { gd, qn };

struct LevelSolver {
  SolverKind kind = SolverKind::qn;
  GDConfig gd;
  QNConfig qn;
  ConvergenceSpec conv;
};

struct NISchedule {
  int levelCount = 5;
  /// One entry per level, or a single entry used for every level.
  std::vector<LevelSolver> solvers{LevelSolver{}};
  /// Values solved in order on the coarsest level before the target omega.
  std::vector<double> omegaContinuation;
  bool multiLevelContinuation = false;
  bool equiangulateBetweenLevels = true;
  DofMask mask;

  const LevelSolver& solver(int level) const;
  /// Throws std::invalid_argument on an inconsistent schedule.
  void validate() const;
};

struct LevelStats {
  int level = 0;  // 1-based
  int vertexCount = 0;
  int iterations = 0;
  double energy = 0.0;
  double absC = 0.0;
  double lambda = 0.0;
  double wallSeconds = 0.0;  // solve only
  double meanAlphaM = 0.0;
  double meanAlphaQ = 0.0;
  double finalAlphaM = 0.0;
  double finalAlphaQ = 0.0;
  Termination termination = Termination::notRun;
  /// multilevel_continuation only: the averaged guess was rejected.
  bool averageRejected = false;
};

struct LevelState {
  SimplicialMesh mesh;
  NodalQField field;
  double lambda = 0.0;
};

struct NIResult {
  SimplicialMesh mesh;
  NodalQField field;
  double lambda = 0.0;
  std::vector<LevelStats> stats;
  std::vector<LevelState> levels;  // converged state per level
  std::vector<SolveTrace> traces;
};

/// Solver failure inside a schedule. `level` is 1-based (0 when not tied to a
/// level); `partial` holds the levels completed before the failure.
class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, int level, double omega, NIResult partial)
      : std::runtime_error(what), level(level), omega(omega), partial(std::move(partial)) {}
  int level;
  double omega;
  NIResult partial;
};

/// One solve with the level's solver; failures (line search, KKT,
/// reprojection) become SolveFailure. Reaching the iteration cap is not a failure.
SolveResult solve_level(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                        const LevelSolver& solver, const DofMask& mask, double lambda0, int level);

/// Refine, optionally equiangulate, and prolong the field onto the new mesh.
LevelState refine_state(const LevelState& coarse, bool equiangulateMesh);

/// Solve on the given grid, then refine, prolong and re-solve levelCount - 1
/// times. With omegaContinuation set, the coarse grid is first taken through
/// the listed omegas.
NIResult ni_solve(const SimplicialMesh& coarseMesh, const NodalQField& coarseField, const MaterialParams& params,
                  const NISchedule& schedule, double lambda0 = 0.0);

struct OmegaState {
  double omega = 0.0;
  LevelState state;
  SolveTrace trace;
};

/// Coarse-grid solves for each omega of schedule.omegaContinuation, each
/// seeded with the previous converged state.
std::vector<OmegaState> continue_omega(const SimplicialMesh& coarseMesh, const NodalQField& coarseField,
                                       const MaterialParams& params, const NISchedule& schedule,
                                       double lambda0 = 0.0);

/// Nested iteration at params.omega where each fine-level guess averages the
/// prolonged current state with the stored state of the previous omega at that
/// level. Level 1 is seeded from previous[0]. An averaged mesh with a
/// nonpositive element, or a connectivity mismatch, falls back to the prolonged state.
NIResult multilevel_continuation(const std::vector<LevelState>& previous, const MaterialParams& params,
                                 const NISchedule& schedule);

/// Componentwise average of positions and Q values; requires identical connectivity.
LevelState average_states(const LevelState& a, const LevelState& b);

}  // namespace tactoid
