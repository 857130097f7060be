#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "tactoid/nested.hpp"

using namespace tactoid;
using testing::jitter;

namespace {

MaterialParams params2d(double tau, double omega) {
  MaterialParams p = default_params(2);
  p.tau = tau;
  p.omega = omega;
  return p;
}

NodalQField aligned_field(const SimplicialMesh& m, const MaterialParams& p) {
  return NodalQField::uniform(from_director(p.S0, Vec3::UnitX(), p.qmode()), m.vertexCount());
}

NISchedule schedule(int levels) {
  NISchedule s;
  s.levelCount = levels;
  return s;
}

}  // namespace

TEST_CASE("schedule validation") {
  NISchedule s = schedule(0);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = schedule(3);
  s.solvers.resize(2);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = schedule(3);
  s.omegaContinuation = {0.1, 0.1};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = schedule(3);
  s.mask = {false, false};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = schedule(3);
  s.solvers.resize(3);
  s.solvers[2].conv.tol = 1e-3;
  CHECK_NOTHROW(s.validate());
  CHECK(s.solver(3).conv.tol == 1e-3);
  CHECK(s.solver(1).conv.tol == 1e-6);
}

TEST_CASE("one level is a direct solve") {
  const SimplicialMesh m = build_coarse_disc(1.0);
  const MaterialParams p = params2d(10, 0.2);
  const NodalQField f = aligned_field(m, p);
  const NISchedule s = schedule(1);
  const NIResult ni = ni_solve(m, f, p, s);
  const SolveResult direct = qn_solve(m, f, p, s.solver(1).qn, s.mask, s.solver(1).conv);
  REQUIRE(ni.stats.size() == 1);
  CHECK(ni.mesh.vertices == direct.mesh.vertices);
  CHECK(ni.field == direct.field);
  CHECK(ni.lambda == direct.lambda);
  CHECK(ni.stats[0].iterations == direct.trace.iterations());
  CHECK(ni.stats[0].energy == direct.trace.finalEnergy());
}

TEST_CASE("zero iteration caps only refine") {
  const SimplicialMesh m = build_coarse_disc(1.0);
  const MaterialParams p = params2d(10, 0.2);
  std::mt19937_64 rng(4);
  const NodalQField f = testing::random_field(m, QMode::planar, rng, 0.3);
  NISchedule s = schedule(3);
  s.solvers[0].conv.maxIterations = 0;
  const NIResult ni = ni_solve(m, f, p, s, 0.25);

  LevelState chain{m, f, 0.25};
  for (int level = 2; level <= 3; ++level) chain = refine_state(chain, true);
  CHECK(ni.mesh.vertices == chain.mesh.vertices);
  CHECK(ni.mesh.elements == chain.mesh.elements);
  CHECK(ni.field == chain.field);
  CHECK(ni.lambda == 0.25);
  for (const auto& st : ni.stats) {
    CHECK(st.iterations == 0);
    CHECK(st.termination == Termination::maxIterations);
  }
}

TEST_CASE("prolongation handoff") {
  SimplicialMesh m = build_coarse_disc(1.0);
  std::mt19937_64 rng(9);
  jitter(m, rng, 0.1, false);
  const NodalQField f = testing::random_field(m, QMode::planar, rng, 0.5);
  const LevelState fine = refine_state({m, f, 1.5}, true);
  for (int v = 0; v < m.vertexCount(); ++v) {
    CHECK(fine.mesh.vertices[v] == m.vertices[v]);
    const auto a = fine.field.comps(v);
    const auto b = f.comps(v);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
  CHECK(fine.lambda == 1.5);
  CHECK(max_opposite_angle_sum(fine.mesh) <= M_PI + 1e-10);
}

TEST_CASE("vertex counts follow edge counts") {
  LevelState s{build_coarse_disc(1.0), NodalQField(QMode::planar, 16), 0.0};
  std::vector<int> counts{s.mesh.vertexCount()};
  for (int i = 0; i < 4; ++i) {
    const int edges = static_cast<int>(mesh_edges(s.mesh).size());
    const int before = s.mesh.vertexCount();
    s = refine_state(s, true);
    CHECK(s.mesh.vertexCount() == before + edges);
    counts.push_back(s.mesh.vertexCount());
  }
  CHECK(counts == std::vector<int>{16, 49, 169, 625, 2401});
}

TEST_CASE("nested iteration on the full 2D problem") {
  const SimplicialMesh m = build_coarse_disc(1.0);
  const MaterialParams p = params2d(10, 0.2);
  const NIResult ni = ni_solve(m, aligned_field(m, p), p, schedule(5));
  REQUIRE(ni.stats.size() == 5);
  for (std::size_t i = 1; i < ni.stats.size(); ++i) CHECK(ni.stats[i].vertexCount > ni.stats[i - 1].vertexCount);
  for (const auto& st : ni.stats) {
    CHECK(st.termination == Termination::converged);
    CHECK(st.absC <= 1e-6);
  }
  CHECK(ni.stats.back().iterations < ni.stats.front().iterations);
  // energies settle under refinement
  const double d1 = std::abs(ni.stats[3].energy - ni.stats[2].energy);
  const double d2 = std::abs(ni.stats[4].energy - ni.stats[3].energy);
  CHECK(d2 < d1);

  // standalone solve on the finest grid from the naive guess
  LevelState naive{m, aligned_field(m, p), 0.0};
  for (int i = 0; i < 4; ++i) naive = refine_state(naive, true);
  naive.field = aligned_field(naive.mesh, p);
  const NISchedule s = schedule(1);
  const SolveResult direct = qn_solve(naive.mesh, naive.field, p, s.solver(1).qn, s.mask, s.solver(1).conv);
  REQUIRE(direct.trace.termination == Termination::converged);
  const double Fd = direct.trace.finalEnergy();
  CHECK(ni.stats.back().energy <= Fd + 1e-6 * std::abs(Fd));
}

TEST_CASE("omega continuation") {
  const SimplicialMesh m = build_coarse_disc(1.0);
  MaterialParams p = params2d(10, 0.04);
  const NodalQField f = aligned_field(m, p);
  NISchedule s = schedule(1);

  SUBCASE("single omega is a plain solve") {
    s.omegaContinuation = {0.04};
    const auto states = continue_omega(m, f, p, s);
    REQUIRE(states.size() == 1);
    const SolveResult direct = qn_solve(m, f, p, s.solver(1).qn, s.mask, s.solver(1).conv);
    CHECK(states[0].state.mesh.vertices == direct.mesh.vertices);
    CHECK(states[0].state.field == direct.field);
  }
  SUBCASE("each solve starts from the previous state") {
    s.omegaContinuation = {0.01, 0.02, 0.04};
    const auto states = continue_omega(m, f, p, s);
    REQUIRE(states.size() == 3);
    MaterialParams q = p;
    q.omega = 0.04;
    const SolveResult again = qn_solve(states[1].state.mesh, states[1].state.field, q, s.solver(1).qn, s.mask,
                                       s.solver(1).conv, states[1].state.lambda);
    CHECK(again.mesh.vertices == states[2].state.mesh.vertices);
    CHECK(again.field == states[2].state.field);
    CHECK(again.trace.iterations() == states[2].trace.iterations());
  }
  SUBCASE("ni_solve runs the chain below the target omega") {
    s.omegaContinuation = {0.01, 0.02, 0.1};
    const NIResult ni = ni_solve(m, f, p, s);
    NISchedule chain = s;
    chain.omegaContinuation = {0.01, 0.02};
    const auto states = continue_omega(m, f, p, chain);
    const SolveResult last = qn_solve(states.back().state.mesh, states.back().state.field, p, s.solver(1).qn, s.mask,
                                      s.solver(1).conv, states.back().state.lambda);
    CHECK(ni.mesh.vertices == last.mesh.vertices);
  }
  SUBCASE("empty list") {
    CHECK_THROWS_AS(continue_omega(m, f, p, s), std::invalid_argument);
  }
}

TEST_CASE("omega continuation in 3D") {
  const SimplicialMesh ball = build_ball(1.0);
  MaterialParams p = default_params(3);
  p.omega = 0.06;
  const NodalQField f = aligned_field(ball, p);
  NISchedule s = schedule(1);
  s.solvers[0].conv.tol = 1e-8;
  s.omegaContinuation = {0.01, 0.02, 0.04, 0.06};
  const auto states = continue_omega(ball, f, p, s);
  int chained = 0;
  for (const auto& st : states) chained = st.trace.iterations();
  const SolveResult cold = qn_solve(ball, f, p, s.solver(1).qn, s.mask, s.solver(1).conv);
  CHECK(states.back().trace.termination == Termination::converged);
  CHECK(chained < cold.trace.iterations());
}

TEST_CASE("state averaging") {
  SimplicialMesh m = build_coarse_disc(1.0);
  std::mt19937_64 rng(21);
  const NodalQField f = testing::random_field(m, QMode::planar, rng, 0.5);
  SUBCASE("idempotent") {
    const LevelState s{m, f, 0.7};
    const LevelState a = average_states(s, s);
    CHECK(a.mesh.vertices == s.mesh.vertices);
    CHECK(a.field == s.field);
    CHECK(a.lambda == 0.7);
  }
  SUBCASE("perturbed discs stay valid") {
    for (int t = 0; t < 20; ++t) {
      SimplicialMesh a = m, b = m;
      jitter(a, rng, 0.1, true);
      jitter(b, rng, 0.1, true);
      const LevelState avg = average_states({a, f, 0.0}, {b, f, 0.0});
      CHECK(all_elements_positive(avg.mesh));
    }
  }
  SUBCASE("connectivity mismatch") {
    SimplicialMesh other = m;
    std::swap(other.elements[0], other.elements[1]);
    CHECK_THROWS_AS(average_states({m, f, 0.0}, {other, f, 0.0}), MeshError);
  }
}

TEST_CASE("multilevel continuation") {
  const SimplicialMesh m = build_coarse_disc(1.0);
  MaterialParams p = params2d(10, 0.2);
  const NISchedule s = schedule(3);
  const NIResult prev = ni_solve(m, aligned_field(m, p), p, s);

  SUBCASE("same omega reuses the stored chain") {
    const NIResult next = multilevel_continuation(prev.levels, p, s);
    REQUIRE(next.stats.size() == 3);
    for (const auto& st : next.stats) {
      CHECK(st.termination == Termination::converged);
      CHECK(st.absC <= 1e-6);
    }
    CHECK(next.stats[0].iterations <= 2);
  }
  SUBCASE("larger omega") {
    p.omega = 0.4;
    const NIResult next = multilevel_continuation(prev.levels, p, s);
    REQUIRE(next.stats.size() == 3);
    CHECK(next.stats.back().termination == Termination::converged);
    CHECK(next.stats.back().energy > prev.stats.back().energy);
  }
  SUBCASE("missing levels") {
    const std::vector<LevelState> few(prev.levels.begin(), prev.levels.begin() + 2);
    CHECK_THROWS_AS(multilevel_continuation(few, p, s), std::invalid_argument);
  }
}

TEST_CASE("solver failures carry the level") {
  // only unit steps are admissible, which the cold start does not allow
  const SimplicialMesh m = build_coarse_disc(1.0);
  MaterialParams p = params2d(10, 0.2);
  NISchedule s = schedule(2);
  s.solvers[0].qn.minStep = 0.9;
  s.solvers[0].qn.shrink = 0.5;
  try {
    ni_solve(m, aligned_field(m, p), p, s);
    WARN_MESSAGE(false, "no failure triggered");
  } catch (const SolveFailure& e) {
    CHECK(e.level >= 1);
    CHECK(e.omega == 0.2);
    CHECK(static_cast<int>(e.partial.stats.size()) == e.level - 1);
  }
}
