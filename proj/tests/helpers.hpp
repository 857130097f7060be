#pragma once

#include <random>

#include "tactoid/energy.hpp"
#include "tactoid/mesh.hpp"
#include "tactoid/qfield.hpp"

namespace testing {

using namespace tactoid;

inline double rel_linf(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

// Moves interior vertices by up to `amount` times the local spacing; boundary
// vertices move as well when `boundary` is set. Keeps every element positive.
inline void jitter(SimplicialMesh& mesh, std::mt19937_64& rng, double amount, bool boundary) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto bnd = boundary_vertices(mesh);
  std::vector<char> isB(mesh.vertexCount(), 0);
  for (int v : bnd) isB[v] = 1;
  double h = std::pow(total_measure(mesh) / mesh.elementCount(), 1.0 / mesh.dimension);
  for (int attempt = 0; attempt < 100; ++attempt) {
    SimplicialMesh trial = mesh;
    for (int v = 0; v < trial.vertexCount(); ++v) {
      if (isB[v] && !boundary) continue;
      for (int i = 0; i < mesh.dimension; ++i) trial.vertices[v][i] += amount * h * u(rng);
    }
    if (all_elements_positive(trial)) {
      mesh = trial;
      return;
    }
  }
}

inline NodalQField random_field(const SimplicialMesh& mesh, QMode mode, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  NodalQField f(mode, mesh.vertexCount());
  for (double& v : f.values()) v = u(rng);
  return f;
}

}  // namespace testing
