#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tactoid {

using Vec3 = Eigen::Vector3d;

/// Raised when a mesh violates one of its structural invariants or contains a
/// zero/negative-measure simplex.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A boundary facet: an edge (2D) or triangle (3D) oriented so that its
/// normal points out of the domain, tagged with the element it belongs to.
struct BoundaryFacet {
  std::array<int, 3> v{-1, -1, -1};  // v[2] unused in 2D
  int element = -1;
};

/// Simplicial complex for the tactoid domain. Positions are stored as 3-vectors
/// in both dimensions (z = 0 in 2D). Elements use the first d+1 indices.
struct SimplicialMesh {
  int dimension = 2;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> elements;
  std::vector<BoundaryFacet> boundaryFacets;

  int vertexCount() const { return static_cast<int>(vertices.size()); }
  int elementCount() const { return static_cast<int>(elements.size()); }
  int simplexSize() const { return dimension + 1; }
  int facetSize() const { return dimension; }
};

/// Per-vertex and per-facet boundary geometry. Vertex entries are indexed by
/// mesh vertex; interior vertices carry no value.
struct BoundaryFrame {
  std::vector<std::optional<Vec3>> vertexTangent;  // 2D only
  std::vector<std::optional<Vec3>> vertexNormal;
  std::vector<Vec3> facetTangent;                  // 2D only (empty in 3D)
  std::vector<Vec3> facetNormal;
};

/// How a fine-grid vertex came to be: a copy of a coarse vertex, or the
/// midpoint of the coarse edge (parentA, parentB).
struct VertexOrigin {
  int parentA = -1;
  int parentB = -1;  // -1 for copied vertices
  bool isMidpoint() const { return parentB >= 0; }
};

struct RefinementMap {
  int coarseVertexCount = 0;
  std::vector<std::vector<int>> children;            // coarse element -> fine elements
  std::vector<std::array<int, 3>> edgeMidpoints;     // (a, b, midpoint) with a < b
  std::vector<VertexOrigin> provenance;              // one per fine vertex
};

struct MeshQualityReport {
  double minAngleDegrees = 0.0;   // min interior angle (2D) or min dihedral angle (3D)
  double minRadiusRatio = 0.0;    // 3D: d * inradius / circumradius, 1 for regular tets
  double measureRatio = 0.0;      // max / min element measure
  int boundaryVertexCount = 0;
};

// --- geometry ------------------------------------------------------------

/// Signed measure (area or volume) of element e.
double element_measure(const SimplicialMesh& mesh, int e);
/// Sum of signed element measures.
double total_measure(const SimplicialMesh& mesh);
/// Total boundary length (2D) or area (3D).
double boundary_measure(const SimplicialMesh& mesh);
/// True when every element has strictly positive measure.
bool all_elements_positive(const SimplicialMesh& mesh);

/// Derives the outward-oriented boundary facets from the element list.
void rebuild_boundary(SimplicialMesh& mesh);
/// Checks orientation, duplicate elements, unreferenced vertices and boundary
/// closure; throws MeshError describing the first violation.
void validate(const SimplicialMesh& mesh);

/// Unique undirected edges (a < b), sorted lexicographically.
std::vector<std::array<int, 2>> mesh_edges(const SimplicialMesh& mesh);
/// Vertex 1-ring adjacency built from the elements.
std::vector<std::vector<int>> vertex_neighbors(const SimplicialMesh& mesh);
/// Sorted indices of vertices lying on the boundary.
std::vector<int> boundary_vertices(const SimplicialMesh& mesh);

/// Uniformly scales positions about the origin so the total measure equals
/// `target`.
void scale_to_measure(SimplicialMesh& mesh, double target);

// --- construction ----------------------------------------------------------

/// Fan triangulation of a regular polygon (boundaryVertexCount sides plus a
/// center vertex), scaled to area targetArea.
SimplicialMesh build_disc(int boundaryVertexCount, double targetArea);
/// Coarsest tactoid grid: a dodecagon with a center vertex and an inner ring
/// of three vertices (16 vertices, 18 triangles), Delaunay, area targetArea.
SimplicialMesh build_coarse_disc(double targetArea);
/// Tetrahedral ball with 27 vertices: a 3x3x3 lattice whose outer vertices are
/// pushed radially onto the sphere, scaled to volume targetVolume.
SimplicialMesh build_ball(double targetVolume);

// --- refinement and quality -------------------------------------------------

/// Splits triangles into 4 and tetrahedra into 8 through edge midpoints. The
/// octahedron left inside each tetrahedron is cut along its shortest diagonal.
std::pair<SimplicialMesh, RefinementMap> refine_uniform(const SimplicialMesh& mesh);

/// Lawson edge flips until every interior edge is locally Delaunay. Boundary
/// edges and vertex positions are untouched. 3D meshes are returned unchanged.
/// Throws MeshError if the flip count exceeds 10 x edge count.
SimplicialMesh equiangulate(const SimplicialMesh& mesh, int* flipCount = nullptr);

/// Sum of the two angles opposite each interior edge; used to check the local
/// Delaunay condition. Returns the largest such sum (0 when no interior edge).
double max_opposite_angle_sum(const SimplicialMesh& mesh);

/// Facet-wise and vertex-averaged boundary tangents/normals. Throws MeshError
/// on a zero-length/zero-area facet.
BoundaryFrame boundary_frames(const SimplicialMesh& mesh);

MeshQualityReport mesh_quality(const SimplicialMesh& mesh);

}  // namespace tactoid
