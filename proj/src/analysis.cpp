#include "tactoid/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tactoid {

double aspect_ratio(const SimplicialMesh& mesh) {
  const int d = mesh.dimension;
  const int k = d + 1;
  double volume = 0.0;
  Vec3 first = Vec3::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const double V = element_measure(mesh, e);
    Vec3 sum = Vec3::Zero();
    Eigen::Matrix3d outer = Eigen::Matrix3d::Zero();
    for (int i = 0; i < k; ++i) {
      const Vec3& p = mesh.vertices[mesh.elements[e][i]];
      sum += p;
      outer += p * p.transpose();
    }
    volume += V;
    first += V / k * sum;
    // exact integral of x x^T over a simplex
    second += V / (k * (k + 1)) * (outer + sum * sum.transpose());
  }
  if (!(volume > 0.0)) throw std::domain_error("aspect_ratio: region has no positive measure");
  const Vec3 c = first / volume;
  const Eigen::Matrix3d J = second - volume * c * c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.topLeftCorner(d, d));
  const auto& ev = es.eigenvalues();
  if (!(ev(0) > 0.0)) throw std::domain_error("aspect_ratio: degenerate second moments");
  return std::sqrt(ev(d - 1) / ev(0));
}

std::vector<double> order_parameter(const NodalQField& field) {
  std::vector<double> S(field.size());
  for (int v = 0; v < field.size(); ++v) S[v] = eigen_decompose(field.at(v)).S;
  return S;
}

std::vector<Vec3> detect_defects(const SimplicialMesh& mesh, const NodalQField& field, double S0, double threshold) {
  const std::vector<double> S = order_parameter(field);
  const auto nbr = vertex_neighbors(mesh);
  const double cut = threshold * S0;
  const int n = mesh.vertexCount();
  std::vector<char> low(n, 0), minimum(n, 0);
  for (int v = 0; v < n; ++v) {
    low[v] = S[v] < cut;
    if (!low[v] || nbr[v].empty()) continue;
    minimum[v] = std::all_of(nbr[v].begin(), nbr[v].end(), [&](int u) { return S[v] < S[u]; });
  }
  std::vector<int> label(n, -1);
  std::vector<Vec3> sites;
  for (int v = 0; v < n; ++v) {
    if (!minimum[v] || label[v] >= 0) continue;
    // flood the sub-threshold region holding v
    const int id = static_cast<int>(sites.size());
    std::vector<int> stack{v};
    label[v] = id;
    Vec3 sum = Vec3::Zero();
    int count = 0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (minimum[u]) {
        sum += mesh.vertices[u];
        ++count;
      }
      for (int w : nbr[u])
        if (low[w] && label[w] < 0) {
          label[w] = id;
          stack.push_back(w);
        }
    }
    sites.push_back(sum / count);
  }
  return sites;
}

double boundary_alignment(const SimplicialMesh& mesh, const NodalQField& field) {
  const BoundaryFrame frame = boundary_frames(mesh);
  const auto bnd = boundary_vertices(mesh);
  if (bnd.empty()) throw MeshError("boundary_alignment: mesh has no boundary");
  double sum = 0.0;
  for (int v : bnd) {
    const Vec3 n = eigen_decompose(field.at(v)).n;
    if (mesh.dimension == 2) {
      sum += std::abs(n.dot(*frame.vertexTangent[v]));
    } else {
      sum += 1.0 - std::abs(n.dot(*frame.vertexNormal[v]));
    }
  }
  return sum / static_cast<double>(bnd.size());
}

}  // namespace tactoid
