#include "tactoid/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace tactoid {

namespace {

struct FaceKey {
  std::array<int, 3> v;
  bool operator==(const FaceKey& o) const { return v == o.v; }
};

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : k.v) {
      h ^= static_cast<std::size_t>(x + 1);
      h *= 1099511628211ull;
    }
    return h;
  }
};

FaceKey sorted_key(std::array<int, 3> v, int n) {
  if (n == 2) v[2] = -1;
  std::sort(v.begin(), v.begin() + n);
  return FaceKey{v};
}

// Outward-oriented faces of a positively oriented tetrahedron (0,1,2,3).
constexpr std::array<std::array<int, 3>, 4> kTetFaces{{{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};
// Counter-clockwise edges of a positively oriented triangle.
constexpr std::array<std::array<int, 2>, 3> kTriEdges{{{0, 1}, {1, 2}, {2, 0}}};

double triangle_area_2d(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

}  // namespace

double element_measure(const SimplicialMesh& mesh, int e) {
  const auto& el = mesh.elements[e];
  const auto& x = mesh.vertices;
  if (mesh.dimension == 2) return triangle_area_2d(x[el[0]], x[el[1]], x[el[2]]);
  return tet_volume(x[el[0]], x[el[1]], x[el[2]], x[el[3]]);
}

double total_measure(const SimplicialMesh& mesh) {
  double sum = 0.0;
  for (int e = 0; e < mesh.elementCount(); ++e) sum += element_measure(mesh, e);
  return sum;
}

double boundary_measure(const SimplicialMesh& mesh) {
  double sum = 0.0;
  for (const auto& f : mesh.boundaryFacets) {
    const Vec3& a = mesh.vertices[f.v[0]];
    const Vec3& b = mesh.vertices[f.v[1]];
    if (mesh.dimension == 2) {
      sum += (b - a).norm();
    } else {
      sum += 0.5 * (b - a).cross(mesh.vertices[f.v[2]] - a).norm();
    }
  }
  return sum;
}

bool all_elements_positive(const SimplicialMesh& mesh) {
  for (int e = 0; e < mesh.elementCount(); ++e) {
    if (!(element_measure(mesh, e) > 0.0)) return false;
  }
  return true;
}

void rebuild_boundary(SimplicialMesh& mesh) {
  const int fs = mesh.facetSize();
  struct Entry {
    BoundaryFacet facet;
    int count = 0;
  };
  std::unordered_map<FaceKey, Entry, FaceKeyHash> faces;
  faces.reserve(mesh.elements.size() * 4);
  std::vector<FaceKey> order;
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const auto& el = mesh.elements[e];
    auto visit = [&](std::array<int, 3> f) {
      FaceKey key = sorted_key(f, fs);
      auto [it, inserted] = faces.try_emplace(key);
      if (inserted) {
        it->second.facet.v = f;
        if (fs == 2) it->second.facet.v[2] = -1;
        it->second.facet.element = e;
        order.push_back(key);
      }
      ++it->second.count;
    };
    if (mesh.dimension == 2) {
      for (const auto& ed : kTriEdges) visit({el[ed[0]], el[ed[1]], -1});
    } else {
      for (const auto& fc : kTetFaces) visit({el[fc[0]], el[fc[1]], el[fc[2]]});
    }
  }
  mesh.boundaryFacets.clear();
  for (const auto& key : order) {
    const Entry& entry = faces.at(key);
    if (entry.count == 1) mesh.boundaryFacets.push_back(entry.facet);
  }
}

void validate(const SimplicialMesh& mesh) {
  if (mesh.dimension != 2 && mesh.dimension != 3) throw MeshError("mesh dimension must be 2 or 3");
  const int n = mesh.vertexCount();
  const int ss = mesh.simplexSize();
  std::vector<char> referenced(n, 0);
  std::vector<std::array<int, 4>> keys;
  keys.reserve(mesh.elements.size());
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const auto& el = mesh.elements[e];
    for (int i = 0; i < ss; ++i) {
      if (el[i] < 0 || el[i] >= n) {
        throw MeshError("element " + std::to_string(e) + " references vertex out of range");
      }
      referenced[el[i]] = 1;
    }
    const double m = element_measure(mesh, e);
    if (!(m > 0.0)) {
      std::ostringstream os;
      os << "element " << e << " has nonpositive measure " << m;
      throw MeshError(os.str());
    }
    std::array<int, 4> s = el;
    std::sort(s.begin(), s.begin() + ss);
    for (int i = 1; i < ss; ++i) {
      if (s[i] == s[i - 1]) throw MeshError("element " + std::to_string(e) + " repeats a vertex");
    }
    if (ss == 3) s[3] = -1;
    keys.push_back(s);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) throw MeshError("duplicate element");
  for (int i = 0; i < n; ++i) {
    if (!referenced[i]) throw MeshError("vertex " + std::to_string(i) + " is not referenced by any element");
  }

  // interior faces must be shared by exactly two elements
  std::unordered_map<FaceKey, int, FaceKeyHash> faceCount;
  for (const auto& el : mesh.elements) {
    if (mesh.dimension == 2) {
      for (const auto& ed : kTriEdges) ++faceCount[sorted_key({el[ed[0]], el[ed[1]], -1}, 2)];
    } else {
      for (const auto& fc : kTetFaces) ++faceCount[sorted_key({el[fc[0]], el[fc[1]], el[fc[2]]}, 3)];
    }
  }
  for (const auto& [key, count] : faceCount) {
    if (count > 2) throw MeshError("non-manifold facet shared by more than two elements");
  }

  if (mesh.boundaryFacets.empty()) throw MeshError("mesh has no boundary facets");
  if (mesh.dimension == 2) {
    std::vector<int> outgoing(n, 0), incoming(n, 0);
    for (const auto& f : mesh.boundaryFacets) {
      ++outgoing[f.v[0]];
      ++incoming[f.v[1]];
    }
    for (int i = 0; i < n; ++i) {
      const int total = outgoing[i] + incoming[i];
      if (total != 0 && (outgoing[i] != 1 || incoming[i] != 1)) {
        throw MeshError("boundary vertex " + std::to_string(i) + " does not have exactly two boundary edges");
      }
    }
  } else {
    std::unordered_map<FaceKey, int, FaceKeyHash> edgeCount;
    for (const auto& f : mesh.boundaryFacets) {
      for (int i = 0; i < 3; ++i) ++edgeCount[sorted_key({f.v[i], f.v[(i + 1) % 3], -1}, 2)];
    }
    for (const auto& [key, count] : edgeCount) {
      if (count != 2) throw MeshError("boundary surface is not closed");
    }
  }
}

std::vector<std::array<int, 2>> mesh_edges(const SimplicialMesh& mesh) {
  std::vector<std::array<int, 2>> edges;
  const int ss = mesh.simplexSize();
  edges.reserve(mesh.elements.size() * (ss == 3 ? 3 : 6));
  for (const auto& el : mesh.elements) {
    for (int i = 0; i < ss; ++i) {
      for (int j = i + 1; j < ss; ++j) {
        edges.push_back({std::min(el[i], el[j]), std::max(el[i], el[j])});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::vector<int>> vertex_neighbors(const SimplicialMesh& mesh) {
  std::vector<std::vector<int>> nbr(mesh.vertexCount());
  for (const auto& e : mesh_edges(mesh)) {
    nbr[e[0]].push_back(e[1]);
    nbr[e[1]].push_back(e[0]);
  }
  for (auto& list : nbr) std::sort(list.begin(), list.end());
  return nbr;
}

std::vector<int> boundary_vertices(const SimplicialMesh& mesh) {
  std::vector<int> out;
  for (const auto& f : mesh.boundaryFacets) {
    for (int i = 0; i < mesh.facetSize(); ++i) out.push_back(f.v[i]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void scale_to_measure(SimplicialMesh& mesh, double target) {
  const double current = total_measure(mesh);
  if (!(current > 0.0)) throw MeshError("cannot rescale a mesh with nonpositive measure");
  const double s = std::pow(target / current, 1.0 / mesh.dimension);
  for (auto& x : mesh.vertices) x *= s;
}

SimplicialMesh build_disc(int boundaryVertexCount, double targetArea) {
  if (boundaryVertexCount < 3) throw std::invalid_argument("build_disc: boundaryVertexCount must be >= 3");
  if (!(targetArea > 0.0)) throw std::invalid_argument("build_disc: targetArea must be > 0");
  SimplicialMesh mesh;
  mesh.dimension = 2;
  mesh.vertices.push_back(Vec3::Zero());
  for (int j = 0; j < boundaryVertexCount; ++j) {
    const double th = 2.0 * std::numbers::pi * j / boundaryVertexCount;
    mesh.vertices.emplace_back(std::cos(th), std::sin(th), 0.0);
  }
  for (int j = 0; j < boundaryVertexCount; ++j) {
    mesh.elements.push_back({0, 1 + j, 1 + (j + 1) % boundaryVertexCount, -1});
  }
  scale_to_measure(mesh, targetArea);
  rebuild_boundary(mesh);
  return mesh;
}

SimplicialMesh build_coarse_disc(double targetArea) {
  if (!(targetArea > 0.0)) throw std::invalid_argument("build_coarse_disc: targetArea must be > 0");
  constexpr int kOuter = 12;
  constexpr int kInner = 3;
  constexpr double kInnerRadius = 0.5;
  SimplicialMesh mesh;
  mesh.dimension = 2;
  // 0..11 boundary, 12 center, 13..15 inner ring
  for (int j = 0; j < kOuter; ++j) {
    const double th = 2.0 * std::numbers::pi * j / kOuter;
    mesh.vertices.emplace_back(std::cos(th), std::sin(th), 0.0);
  }
  const int center = kOuter;
  mesh.vertices.push_back(Vec3::Zero());
  for (int i = 0; i < kInner; ++i) {
    const double th = 2.0 * std::numbers::pi * i / kInner;
    mesh.vertices.emplace_back(kInnerRadius * std::cos(th), kInnerRadius * std::sin(th), 0.0);
  }
  auto inner = [&](int i) { return kOuter + 1 + (i % kInner); };
  auto outer = [&](int j) { return j % kOuter; };
  auto add = [&](int a, int b, int c) {
    if (triangle_area_2d(mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]) < 0.0) std::swap(b, c);
    mesh.elements.push_back({a, b, c, -1});
  };
  for (int i = 0; i < kInner; ++i) add(center, inner(i), inner(i + 1));
  // strip between the inner ring and the boundary, advancing by angle
  int i = 0;
  int j = 0;
  while (i < kInner || j < kOuter) {
    const double nextInner = 2.0 * std::numbers::pi * (i + 1) / kInner;
    const double nextOuter = 2.0 * std::numbers::pi * (j + 1) / kOuter;
    if (j < kOuter && (i == kInner || nextOuter <= nextInner + 1e-12)) {
      add(inner(i), outer(j), outer(j + 1));
      ++j;
    } else {
      add(inner(i), outer(j), inner(i + 1));
      ++i;
    }
  }
  scale_to_measure(mesh, targetArea);
  rebuild_boundary(mesh);
  return equiangulate(mesh);
}

SimplicialMesh build_ball(double targetVolume) {
  if (!(targetVolume > 0.0)) throw std::invalid_argument("build_ball: targetVolume must be > 0");
  SimplicialMesh mesh;
  mesh.dimension = 3;
  auto index = [](int i, int j, int k) { return i * 9 + j * 3 + k; };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        Vec3 p(i - 1.0, j - 1.0, k - 1.0);
        const double r = p.norm();
        if (r > 0.0) p /= r;  // every non-center lattice point lies on the cube surface
        mesh.vertices.push_back(p);
      }
    }
  }
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      for (int sz : {-1, 1}) {
        const std::array<int, 3> s{sx, sy, sz};
        for (const auto& p : perms) {
          std::array<int, 3> c{0, 0, 0};
          std::array<int, 4> tet{};
          tet[0] = index(1, 1, 1);
          for (int step = 0; step < 3; ++step) {
            c[p[step]] = s[p[step]];
            tet[step + 1] = index(c[0] + 1, c[1] + 1, c[2] + 1);
          }
          const auto& x = mesh.vertices;
          if (tet_volume(x[tet[0]], x[tet[1]], x[tet[2]], x[tet[3]]) < 0.0) std::swap(tet[2], tet[3]);
          mesh.elements.push_back(tet);
        }
      }
    }
  }
  scale_to_measure(mesh, targetVolume);
  rebuild_boundary(mesh);
  return mesh;
}

BoundaryFrame boundary_frames(const SimplicialMesh& mesh) {
  BoundaryFrame frame;
  const int n = mesh.vertexCount();
  frame.vertexNormal.assign(n, std::nullopt);
  std::vector<Vec3> normalSum(n, Vec3::Zero());
  std::vector<char> onBoundary(n, 0);
  if (mesh.dimension == 2) {
    frame.vertexTangent.assign(n, std::nullopt);
    std::vector<Vec3> tangentSum(n, Vec3::Zero());
    for (const auto& f : mesh.boundaryFacets) {
      const Vec3 u = mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]];
      const double len = u.norm();
      if (!(len > 0.0)) throw MeshError("degenerate boundary edge");
      const Vec3 t = u / len;
      const Vec3 nu(t.y(), -t.x(), 0.0);
      frame.facetTangent.push_back(t);
      frame.facetNormal.push_back(nu);
      for (int i = 0; i < 2; ++i) {
        tangentSum[f.v[i]] += t;
        normalSum[f.v[i]] += nu;
        onBoundary[f.v[i]] = 1;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!onBoundary[i]) continue;
      const double tn = tangentSum[i].norm();
      if (!(tn > 1e-14)) throw MeshError("boundary vertex with cancelling tangents (cusp)");
      frame.vertexTangent[i] = tangentSum[i] / tn;
      frame.vertexNormal[i] = normalSum[i] / normalSum[i].norm();
    }
  } else {
    for (const auto& f : mesh.boundaryFacets) {
      const Vec3& a = mesh.vertices[f.v[0]];
      const Vec3 nvec = (mesh.vertices[f.v[1]] - a).cross(mesh.vertices[f.v[2]] - a);
      const double len = nvec.norm();
      if (!(len > 0.0)) throw MeshError("degenerate boundary triangle");
      frame.facetNormal.push_back(nvec / len);
      for (int i = 0; i < 3; ++i) {
        normalSum[f.v[i]] += nvec;  // |nvec| = 2 * area, so this is area weighted
        onBoundary[f.v[i]] = 1;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!onBoundary[i]) continue;
      const double nn = normalSum[i].norm();
      if (!(nn > 1e-14)) throw MeshError("boundary vertex with cancelling normals");
      frame.vertexNormal[i] = normalSum[i] / nn;
    }
  }
  return frame;
}

MeshQualityReport mesh_quality(const SimplicialMesh& mesh) {
  MeshQualityReport rep;
  rep.boundaryVertexCount = static_cast<int>(boundary_vertices(mesh).size());
  double minM = std::numeric_limits<double>::infinity();
  double maxM = 0.0;
  double minAngle = std::numbers::pi;
  double minRatio = 1.0;
  const auto& x = mesh.vertices;
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const auto& el = mesh.elements[e];
    const double m = element_measure(mesh, e);
    minM = std::min(minM, m);
    maxM = std::max(maxM, m);
    if (mesh.dimension == 2) {
      for (int i = 0; i < 3; ++i) {
        const Vec3 u = x[el[(i + 1) % 3]] - x[el[i]];
        const Vec3 v = x[el[(i + 2) % 3]] - x[el[i]];
        minAngle = std::min(minAngle, std::atan2(u.cross(v).norm(), u.dot(v)));
      }
    } else {
      std::array<Vec3, 4> normals;
      double faceArea = 0.0;
      for (int f = 0; f < 4; ++f) {
        const auto& fc = kTetFaces[f];
        const Vec3 nvec = (x[el[fc[1]]] - x[el[fc[0]]]).cross(x[el[fc[2]]] - x[el[fc[0]]]);
        faceArea += 0.5 * nvec.norm();
        normals[f] = nvec.normalized();
      }
      for (int f = 0; f < 4; ++f) {
        for (int g = f + 1; g < 4; ++g) {
          const double c = std::clamp(normals[f].dot(normals[g]), -1.0, 1.0);
          minAngle = std::min(minAngle, std::numbers::pi - std::acos(c));
        }
      }
      // circumradius from the linear system 2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2
      Eigen::Matrix3d A;
      Vec3 rhs;
      for (int i = 0; i < 3; ++i) {
        A.row(i) = 2.0 * (x[el[i + 1]] - x[el[0]]).transpose();
        rhs[i] = x[el[i + 1]].squaredNorm() - x[el[0]].squaredNorm();
      }
      const Vec3 cc = A.partialPivLu().solve(rhs);
      const double R = (cc - x[el[0]]).norm();
      const double r = 3.0 * std::abs(m) / faceArea;
      minRatio = std::min(minRatio, 3.0 * r / R);
    }
  }
  rep.minAngleDegrees = std::max(0.0, minAngle * 180.0 / std::numbers::pi);
  rep.minRadiusRatio = mesh.dimension == 3 ? std::max(0.0, minRatio) : 0.0;
  rep.measureRatio = (minM > 0.0) ? maxM / minM : 0.0;
  return rep;
}

}  // namespace tactoid
