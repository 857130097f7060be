#pragma once

#include <vector>

#include "tactoid/mesh.hpp"
#include "tactoid/qfield.hpp"

namespace tactoid {

/// Largest over smallest semi-axis of the ellipse (ellipsoid) with the same
/// second-moment tensor about the centroid. Throws std::domain_error on a
/// region of zero measure.
double aspect_ratio(const SimplicialMesh& mesh);

/// Scalar order parameter at every vertex.
std::vector<double> order_parameter(const NodalQField& field);

/// Vertices with S < threshold * S0 that are strict minima of S over their
/// 1-ring. Candidates connected through sub-threshold vertices form one site;
/// the site location is the mean position of its minima. Sites are ordered
/// by their smallest vertex index.
std::vector<Vec3> detect_defects(const SimplicialMesh& mesh, const NodalQField& field, double S0,
                                 double threshold = 0.5);

/// Mean over boundary vertices of |n.t| in 2D and 1 - |n.nu| in 3D.
double boundary_alignment(const SimplicialMesh& mesh, const NodalQField& field);

}  // namespace tactoid
