#include "tactoid/nested.hpp"

#include <chrono>
#include <optional>

namespace tactoid {

namespace {

bool is_failure(Termination t) {
  return t == Termination::lineSearchFailure || t == Termination::kktFailure ||
         t == Termination::reprojectionFailure;
}

LevelStats make_stats(int level, const SolveResult& r, double seconds) {
  LevelStats s;
  s.level = level;
  s.vertexCount = r.mesh.vertexCount();
  s.iterations = r.trace.iterations();
  s.energy = r.trace.finalEnergy();
  s.lambda = r.lambda;
  s.wallSeconds = seconds;
  s.termination = r.trace.termination;
  for (const auto& rec : r.trace.records) {
    s.meanAlphaM += rec.alphaM;
    s.meanAlphaQ += rec.alphaQ;
  }
  if (!r.trace.records.empty()) {
    s.meanAlphaM /= r.trace.iterations();
    s.meanAlphaQ /= r.trace.iterations();
    s.finalAlphaM = r.trace.records.back().alphaM;
    s.finalAlphaQ = r.trace.records.back().alphaQ;
  }
  return s;
}

struct Timed {
  SolveResult result;
  double seconds;
};

Timed timed_solve(const LevelState& start, const MaterialParams& params, const LevelSolver& solver,
                  const DofMask& mask, int level) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult r = solve_level(start.mesh, start.field, params, solver, mask, start.lambda, level);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(r), sec};
}

void record(NIResult& out, int level, const Timed& t, const MaterialParams& params) {
  LevelStats s = make_stats(level, t.result, t.seconds);
  s.absC = std::abs(constraint(t.result.mesh, params));
  out.stats.push_back(s);
  out.levels.push_back({t.result.mesh, t.result.field, t.result.lambda});
  out.traces.push_back(t.result.trace);
  out.mesh = t.result.mesh;
  out.field = t.result.field;
  out.lambda = t.result.lambda;
}

}  // namespace

const LevelSolver& NISchedule::solver(int level) const {
  if (solvers.size() == 1) return solvers.front();
  return solvers.at(level - 1);
}

void NISchedule::validate() const {
  if (levelCount < 1) throw std::invalid_argument("NISchedule: levelCount must be >= 1");
  if (solvers.empty() || (solvers.size() != 1 && static_cast<int>(solvers.size()) != levelCount))
    throw std::invalid_argument("NISchedule: need one solver config or one per level");
  for (std::size_t i = 1; i < omegaContinuation.size(); ++i)
    if (!(omegaContinuation[i] > omegaContinuation[i - 1]))
      throw std::invalid_argument("NISchedule: omega continuation list must be strictly increasing");
  for (double w : omegaContinuation)
    if (w < 0.0) throw std::invalid_argument("NISchedule: omega must be >= 0");
  if (!mask.freeShape && !mask.freeField) throw std::invalid_argument("NISchedule: mask frees nothing");
}

SolveResult solve_level(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                        const LevelSolver& solver, const DofMask& mask, double lambda0, int level) {
  SolveResult r = solver.kind == SolverKind::qn ? qn_solve(mesh, field, params, solver.qn, mask, solver.conv, lambda0)
                                                : gd_solve(mesh, field, params, solver.gd, mask, solver.conv);
  if (is_failure(r.trace.termination)) {
    NIResult partial;
    throw SolveFailure("level " + std::to_string(level) + " (omega " + std::to_string(params.omega) +
                           "): " + to_string(r.trace.termination) + ": " + r.trace.message,
                       level, params.omega, std::move(partial));
  }
  return r;
}

LevelState refine_state(const LevelState& coarse, bool equiangulateMesh) {
  auto [fine, map] = refine_uniform(coarse.mesh);
  LevelState out;
  out.field = prolong(coarse.field, map);
  // flips only permute connectivity, so nodal values stay with their vertices
  out.mesh = equiangulateMesh && fine.dimension == 2 ? equiangulate(fine) : std::move(fine);
  out.lambda = coarse.lambda;
  return out;
}

std::vector<OmegaState> continue_omega(const SimplicialMesh& coarseMesh, const NodalQField& coarseField,
                                       const MaterialParams& params, const NISchedule& schedule, double lambda0) {
  schedule.validate();
  if (schedule.omegaContinuation.empty()) throw std::invalid_argument("continue_omega: empty omega list");
  std::vector<OmegaState> out;
  LevelState state{coarseMesh, coarseField, lambda0};
  for (double w : schedule.omegaContinuation) {
    MaterialParams p = params;
    p.omega = w;
    SolveResult r;
    try {
      r = solve_level(state.mesh, state.field, p, schedule.solver(1), schedule.mask, state.lambda, 1);
    } catch (const SolveFailure& e) {
      throw SolveFailure(std::string("omega continuation at omega ") + std::to_string(w) + ": " + e.what(), 1, w,
                         NIResult{});
    }
    state = {r.mesh, r.field, r.lambda};
    out.push_back({w, state, std::move(r.trace)});
  }
  return out;
}

NIResult ni_solve(const SimplicialMesh& coarseMesh, const NodalQField& coarseField, const MaterialParams& params,
                  const NISchedule& schedule, double lambda0) {
  schedule.validate();
  NIResult out;
  LevelState start{coarseMesh, coarseField, lambda0};
  if (!schedule.omegaContinuation.empty()) {
    NISchedule chain = schedule;
    chain.omegaContinuation.clear();
    for (double w : schedule.omegaContinuation)
      if (w < params.omega) chain.omegaContinuation.push_back(w);
    if (!chain.omegaContinuation.empty()) start = continue_omega(coarseMesh, coarseField, params, chain, lambda0).back().state;
  }
  for (int level = 1; level <= schedule.levelCount; ++level) {
    if (level > 1) start = refine_state(out.levels.back(), schedule.equiangulateBetweenLevels);
    try {
      record(out, level, timed_solve(start, params, schedule.solver(level), schedule.mask, level), params);
    } catch (SolveFailure& e) {
      throw SolveFailure(e.what(), level, params.omega, std::move(out));
    }
  }
  return out;
}

LevelState average_states(const LevelState& a, const LevelState& b) {
  if (a.mesh.dimension != b.mesh.dimension || a.mesh.elements != b.mesh.elements ||
      a.mesh.vertexCount() != b.mesh.vertexCount() || a.field.mode() != b.field.mode())
    throw MeshError("average_states: connectivity differs");
  LevelState out = a;
  for (int v = 0; v < a.mesh.vertexCount(); ++v) out.mesh.vertices[v] = 0.5 * (a.mesh.vertices[v] + b.mesh.vertices[v]);
  for (std::size_t i = 0; i < a.field.values().size(); ++i)
    out.field.values()[i] = 0.5 * (a.field.values()[i] + b.field.values()[i]);
  out.lambda = 0.5 * (a.lambda + b.lambda);
  return out;
}

NIResult multilevel_continuation(const std::vector<LevelState>& previous, const MaterialParams& params,
                                 const NISchedule& schedule) {
  schedule.validate();
  if (static_cast<int>(previous.size()) < schedule.levelCount)
    throw std::invalid_argument("multilevel_continuation: need a stored state for every level");
  NIResult out;
  for (int level = 1; level <= schedule.levelCount; ++level) {
    LevelState start = previous[0];
    bool rejected = false;
    if (level > 1) {
      const LevelState& stored = previous[level - 1];
      const bool eq = schedule.equiangulateBetweenLevels;
      const LevelState raw = refine_state(out.levels.back(), false);
      start = eq ? refine_state(out.levels.back(), true) : raw;
      // the stored state may carry either the flipped or the unflipped connectivity
      std::optional<LevelState> avg;
      if (start.mesh.elements == stored.mesh.elements) {
        avg = average_states(start, stored);
      } else if (raw.mesh.elements == stored.mesh.elements) {
        avg = average_states(raw, stored);
        if (eq && all_elements_positive(avg->mesh)) avg->mesh = equiangulate(avg->mesh);
      }
      if (avg && all_elements_positive(avg->mesh)) start = std::move(*avg);
      else rejected = true;
    }
    try {
      record(out, level, timed_solve(start, params, schedule.solver(level), schedule.mask, level), params);
    } catch (SolveFailure& e) {
      throw SolveFailure(e.what(), level, params.omega, std::move(out));
    }
    out.stats.back().averageRejected = rejected;
  }
  return out;
}

}  // namespace tactoid
