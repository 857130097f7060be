#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "tactoid/analysis.hpp"

using namespace tactoid;

namespace {

SimplicialMesh transformed(SimplicialMesh m, const Eigen::Matrix3d& A, const Vec3& shift) {
  for (Vec3& p : m.vertices) p = A * p + shift;
  return m;
}

// Planar field whose magnitude dips to 45% around the given points. The
// planar embedding fixes q_zz, so S is monotone in the magnitude only down to
// about a third of it.
NodalQField dipped_field(const SimplicialMesh& mesh, double S0, const std::vector<Vec3>& centers, double width) {
  const QTensor q0 = from_director(S0, Vec3::UnitX(), QMode::planar);
  NodalQField f(QMode::planar, mesh.vertexCount());
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    double scale = 1.0;
    for (const Vec3& c : centers) scale *= 1.0 - 0.55 * std::exp(-(mesh.vertices[v] - c).squaredNorm() / (width * width));
    QTensor q = q0;
    for (int i = 0; i < 2; ++i) q.c[i] *= scale;
    f.set(v, q);
  }
  return f;
}

}  // namespace

TEST_CASE("aspect ratio of regular polygons and stretched discs") {
  for (int n : {6, 17, 64}) CHECK(aspect_ratio(build_disc(n, 1.0)) == doctest::Approx(1.0).epsilon(1e-6));
  const SimplicialMesh disc = build_disc(48, 2.0);
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
  A(0, 0) = 2.0;
  CHECK(aspect_ratio(transformed(disc, A, Vec3::Zero())) == doctest::Approx(2.0).epsilon(1e-10));
  A(0, 0) = 3.0;
  CHECK(aspect_ratio(transformed(build_disc(128, 1.0), A, Vec3::Zero())) == doctest::Approx(3.0).epsilon(0.02));
  CHECK(aspect_ratio(build_ball(1.0)) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("aspect ratio is invariant under rigid motion and scaling") {
  std::mt19937_64 rng(5);
  SimplicialMesh m = build_disc(20, 1.0);
  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  S(1, 1) = 0.6;
  m = transformed(m, S, Vec3::Zero());
  testing::jitter(m, rng, 0.2, true);
  const double ref = aspect_ratio(m);
  const double t = 0.7;
  Eigen::Matrix3d R;
  R << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
  CHECK(std::abs(aspect_ratio(transformed(m, R, Vec3(3.0, -2.0, 0.0))) - ref) <= 1e-10);
  CHECK(std::abs(aspect_ratio(transformed(m, 4.5 * Eigen::Matrix3d::Identity(), Vec3::Zero())) - ref) <= 1e-10);
}

TEST_CASE("aspect ratio rejects a collapsed region") {
  SimplicialMesh m = build_disc(8, 1.0);
  for (Vec3& p : m.vertices) p.y() = 0.0;
  CHECK_THROWS_AS(aspect_ratio(m), std::domain_error);
}

TEST_CASE("uniform field has no defects") {
  const SimplicialMesh mesh = refine_uniform(build_coarse_disc(1.0)).first;
  const MaterialParams p = default_params(2);
  const NodalQField f = NodalQField::uniform(from_director(p.S0, Vec3::UnitX(), QMode::planar), mesh.vertexCount());
  CHECK(detect_defects(mesh, f, p.S0).empty());
}

TEST_CASE("two dips give two defects, independent of labelling") {
  const SimplicialMesh mesh = refine_uniform(refine_uniform(build_disc(32, M_PI)).first).first;
  const double S0 = default_params(2).S0;
  const std::vector<Vec3> centers = {Vec3(-0.45, 0.05, 0.0), Vec3(0.5, -0.1, 0.0)};
  const NodalQField f = dipped_field(mesh, S0, centers, 0.2);
  const auto sites = detect_defects(mesh, f, S0);
  REQUIRE(sites.size() == 2);
  const double h = std::sqrt(total_measure(mesh) / mesh.elementCount()) * 2.0;
  for (const Vec3& c : centers) {
    double best = 1e9;
    for (const Vec3& s : sites) best = std::min(best, (s - c).norm());
    CHECK(best <= h);
  }

  // reverse the vertex order
  const int n = mesh.vertexCount();
  SimplicialMesh r = mesh;
  NodalQField rf(QMode::planar, n);
  for (int v = 0; v < n; ++v) {
    r.vertices[n - 1 - v] = mesh.vertices[v];
    rf.set(n - 1 - v, f.at(v));
  }
  for (auto& el : r.elements)
    for (int i = 0; i < 3; ++i) el[i] = n - 1 - el[i];
  rebuild_boundary(r);
  CHECK(detect_defects(r, rf, S0).size() == 2);
}

TEST_CASE("order parameter of a uniaxial field") {
  const NodalQField f = NodalQField::uniform(from_director(0.4, Vec3(0, 0, 1), QMode::full), 3);
  for (double s : order_parameter(f)) CHECK(s == doctest::Approx(0.4));
}

TEST_CASE("boundary alignment") {
  const SimplicialMesh mesh = build_disc(256, M_PI);
  const BoundaryFrame frame = boundary_frames(mesh);
  NodalQField tangent(QMode::planar, mesh.vertexCount());
  for (int v = 0; v < mesh.vertexCount(); ++v)
    tangent.set(v, from_director(1.0, frame.vertexTangent[v] ? *frame.vertexTangent[v] : Vec3::UnitX(), QMode::planar));
  CHECK(boundary_alignment(mesh, tangent) == doctest::Approx(1.0).epsilon(1e-12));
  const NodalQField x = NodalQField::uniform(from_director(1.0, Vec3::UnitX(), QMode::planar), mesh.vertexCount());
  CHECK(boundary_alignment(mesh, x) == doctest::Approx(2.0 / M_PI).epsilon(1e-3));

  const SimplicialMesh ball = refine_uniform(build_ball(1.0)).first;
  const BoundaryFrame bf = boundary_frames(ball);
  NodalQField normal(QMode::full, ball.vertexCount());
  for (int v = 0; v < ball.vertexCount(); ++v)
    normal.set(v, from_director(0.5, bf.vertexNormal[v] ? *bf.vertexNormal[v] : Vec3::UnitX(), QMode::full));
  CHECK(boundary_alignment(ball, normal) == doctest::Approx(0.0).epsilon(1e-12));
}
