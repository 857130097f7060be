#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "tactoid/mesh.hpp"

namespace tactoid {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double signed_volume(const std::vector<Vec3>& x, const std::array<int, 4>& t) {
  return (x[t[1]] - x[t[0]]).dot((x[t[2]] - x[t[0]]).cross(x[t[3]] - x[t[0]])) / 6.0;
}

double angle_at(const Vec3& apex, const Vec3& p, const Vec3& q) {
  const Vec3 u = p - apex;
  const Vec3 v = q - apex;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

std::pair<SimplicialMesh, RefinementMap> refine_uniform(const SimplicialMesh& mesh) {
  SimplicialMesh fine;
  fine.dimension = mesh.dimension;
  fine.vertices = mesh.vertices;

  RefinementMap map;
  map.coarseVertexCount = mesh.vertexCount();
  map.provenance.resize(mesh.vertexCount());
  for (int i = 0; i < mesh.vertexCount(); ++i) map.provenance[i] = VertexOrigin{i, -1};

  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(mesh.elements.size() * 6);
  for (const auto& e : mesh_edges(mesh)) {
    const int m = fine.vertexCount();
    fine.vertices.push_back(0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]));
    map.provenance.push_back(VertexOrigin{e[0], e[1]});
    map.edgeMidpoints.push_back({e[0], e[1], m});
    midpoint.emplace(edge_key(e[0], e[1]), m);
  }
  auto mid = [&](int a, int b) { return midpoint.at(edge_key(a, b)); };

  map.children.resize(mesh.elements.size());
  for (int e = 0; e < mesh.elementCount(); ++e) {
    const auto& el = mesh.elements[e];
    auto& kids = map.children[e];
    auto push = [&](std::array<int, 4> t) {
      kids.push_back(fine.elementCount());
      fine.elements.push_back(t);
    };
    if (mesh.dimension == 2) {
      const int a = el[0], b = el[1], c = el[2];
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      push({a, ab, ca, -1});
      push({ab, b, bc, -1});
      push({ca, bc, c, -1});
      push({ab, bc, ca, -1});
    } else {
      const int v0 = el[0], v1 = el[1], v2 = el[2], v3 = el[3];
      const int m01 = mid(v0, v1), m02 = mid(v0, v2), m03 = mid(v0, v3);
      const int m12 = mid(v1, v2), m13 = mid(v1, v3), m23 = mid(v2, v3);
      push({v0, m01, m02, m03});
      push({m01, v1, m12, m13});
      push({m02, m12, v2, m23});
      push({m03, m13, m23, v3});
      // interior octahedron: pick the shortest of its three diagonals and
      // fan the four tetrahedra around it; each diagonal's equator is a
      // 4-cycle of the remaining midpoints
      const auto& x = fine.vertices;
      struct Diagonal {
        int p, q;
        std::array<int, 4> ring;
      };
      const std::array<Diagonal, 3> diags{{{m01, m23, {m02, m12, m13, m03}},
                                           {m02, m13, {m01, m12, m23, m03}},
                                           {m03, m12, {m01, m13, m23, m02}}}};
      int best = 0;
      double bestLen = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 3; ++k) {
        const double len = (x[diags[k].p] - x[diags[k].q]).squaredNorm();
        if (len < bestLen - 1e-14 * len) {
          bestLen = len;
          best = k;
        }
      }
      const Diagonal& d = diags[best];
      for (int k = 0; k < 4; ++k) {
        std::array<int, 4> t{d.p, d.q, d.ring[k], d.ring[(k + 1) % 4]};
        if (signed_volume(fine.vertices, t) < 0.0) std::swap(t[2], t[3]);
        push(t);
      }
    }
  }
  rebuild_boundary(fine);
  return {std::move(fine), std::move(map)};
}

namespace {

struct EdgeSlots {
  std::array<int, 2> tri{-1, -1};
  int count = 0;
};

class FlipTopology {
 public:
  explicit FlipTopology(std::vector<std::array<int, 3>>& tris) : tris_(tris) {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) add(t);
  }

  void add(int t) {
    for (int i = 0; i < 3; ++i) {
      auto& s = edges_[edge_key(tris_[t][i], tris_[t][(i + 1) % 3])];
      s.tri[s.count++] = t;
    }
  }

  void remove(int t) {
    for (int i = 0; i < 3; ++i) {
      auto& s = edges_[edge_key(tris_[t][i], tris_[t][(i + 1) % 3])];
      if (s.tri[0] == t) s.tri[0] = s.tri[1];
      s.tri[1] = -1;
      --s.count;
    }
  }

  const EdgeSlots* find(std::uint64_t key) const {
    auto it = edges_.find(key);
    return it == edges_.end() ? nullptr : &it->second;
  }

  std::vector<std::uint64_t> interior_keys() const {
    std::vector<std::uint64_t> keys;
    for (const auto& [k, s] : edges_) {
      if (s.count == 2) keys.push_back(k);
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  }

  std::size_t edge_count() const { return edges_.size(); }

 private:
  std::vector<std::array<int, 3>>& tris_;
  std::unordered_map<std::uint64_t, EdgeSlots> edges_;
};

// Returns the local index of the vertex of t opposite the edge (a, b).
int opposite_local(const std::array<int, 3>& t, int a, int b) {
  for (int i = 0; i < 3; ++i) {
    if (t[i] != a && t[i] != b) return i;
  }
  return -1;
}

}  // namespace

SimplicialMesh equiangulate(const SimplicialMesh& mesh, int* flipCount) {
  if (flipCount) *flipCount = 0;
  if (mesh.dimension != 2) return mesh;

  std::vector<std::array<int, 3>> tris;
  tris.reserve(mesh.elements.size());
  for (const auto& el : mesh.elements) tris.push_back({el[0], el[1], el[2]});
  FlipTopology topo(tris);
  const auto& x = mesh.vertices;

  std::vector<std::uint64_t> stack = topo.interior_keys();
  std::reverse(stack.begin(), stack.end());
  const long long flipLimit = 10LL * static_cast<long long>(topo.edge_count());
  long long flips = 0;
  constexpr double kTol = 1e-10;

  while (!stack.empty()) {
    const std::uint64_t key = stack.back();
    stack.pop_back();
    const EdgeSlots* slots = topo.find(key);
    if (!slots || slots->count != 2) continue;
    const int t1 = slots->tri[0];
    const int t2 = slots->tri[1];
    const int ea = static_cast<int>(key >> 32);
    const int eb = static_cast<int>(key & 0xffffffffu);
    const int l1 = opposite_local(tris[t1], ea, eb);
    const int l2 = opposite_local(tris[t2], ea, eb);
    // orient so that t1 = (a, b, c) counter-clockwise and t2 = (b, a, d)
    const int c = tris[t1][l1];
    const int a = tris[t1][(l1 + 1) % 3];
    const int b = tris[t1][(l1 + 2) % 3];
    const int d = tris[t2][l2];
    const double sum = angle_at(x[c], x[a], x[b]) + angle_at(x[d], x[a], x[b]);
    if (sum <= std::numbers::pi + kTol) continue;
    const std::array<int, 3> n1{a, d, c};
    const std::array<int, 3> n2{d, b, c};
    if (!(signed_area(x[n1[0]], x[n1[1]], x[n1[2]]) > 0.0) || !(signed_area(x[n2[0]], x[n2[1]], x[n2[2]]) > 0.0)) {
      continue;
    }
    topo.remove(t1);
    topo.remove(t2);
    tris[t1] = n1;
    tris[t2] = n2;
    topo.add(t1);
    topo.add(t2);
    if (++flips > flipLimit) throw MeshError("equiangulation did not terminate");
    for (auto [p, q] : {std::pair{a, d}, std::pair{d, b}, std::pair{b, c}, std::pair{c, a}}) {
      stack.push_back(edge_key(p, q));
    }
  }

  SimplicialMesh out;
  out.dimension = 2;
  out.vertices = mesh.vertices;
  out.elements.reserve(tris.size());
  for (const auto& t : tris) out.elements.push_back({t[0], t[1], t[2], -1});
  rebuild_boundary(out);
  if (flipCount) *flipCount = static_cast<int>(flips);
  return out;
}

double max_opposite_angle_sum(const SimplicialMesh& mesh) {
  if (mesh.dimension != 2) return 0.0;
  std::vector<std::array<int, 3>> tris;
  for (const auto& el : mesh.elements) tris.push_back({el[0], el[1], el[2]});
  FlipTopology topo(tris);
  const auto& x = mesh.vertices;
  double worst = 0.0;
  for (std::uint64_t key : topo.interior_keys()) {
    const EdgeSlots* s = topo.find(key);
    const int ea = static_cast<int>(key >> 32);
    const int eb = static_cast<int>(key & 0xffffffffu);
    const int c = tris[s->tri[0]][opposite_local(tris[s->tri[0]], ea, eb)];
    const int d = tris[s->tri[1]][opposite_local(tris[s->tri[1]], ea, eb)];
    worst = std::max(worst, angle_at(x[c], x[ea], x[eb]) + angle_at(x[d], x[ea], x[eb]));
  }
  return worst;
}

}  // namespace tactoid
