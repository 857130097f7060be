#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "tactoid/mesh.hpp"

namespace tactoid {

/// Parameterization of the symmetric traceless Q-tensor.
///  - planar: (q_xx, q_xy) embedded as [[q_xx, q_xy, 0], [q_xy, 1/3 - q_xx, 0], [0, 0, -1/3]]
///  - full:   (q_xx, q_xy, q_xz, q_yy, q_yz) with q_zz = -q_xx - q_yy
enum class QMode { planar, full };

constexpr int component_count(QMode mode) { return mode == QMode::planar ? 2 : 5; }

struct QTensor {
  QMode mode = QMode::planar;
  std::array<double, 5> c{};

  int size() const { return component_count(mode); }
};

/// Embeds Q into the 3x3 symmetric traceless matrix of its parameterization.
Eigen::Matrix3d embed_3x3(const QTensor& q);
/// Reads the independent components back from a 3x3 matrix (inverse of
/// embed_3x3 on the image of the parameterization).
QTensor extract_components(QMode mode, const Eigen::Matrix3d& m);

/// Constant part and per-component basis: embed_3x3(q) = offset + sum_k q_k basis[k].
const Eigen::Matrix3d& embedding_offset(QMode mode);
const std::array<Eigen::Matrix3d, 5>& embedding_basis(QMode mode);
/// Gram matrix <basis_k, basis_l> of the embedding (Frobenius inner product).
const Eigen::Matrix<double, 5, 5>& embedding_metric(QMode mode);

struct Director {
  double S = 0.0;
  Vec3 n = Vec3::UnitX();
  bool degenerate = false;  // leading eigenvalue gap below 1e-12
};

/// Components of S (n n^T - I/3) in the given parameterization. Requires
/// |n| = 1; planar mode requires n_z = 0.
QTensor from_director(double S, const Vec3& n, QMode mode);

/// S = (3/2) lambda_max of embed_3x3(Q), n its unit eigenvector with the first
/// nonzero component positive.
Director eigen_decompose(const QTensor& q);

enum class Anchoring { tangential, normal };

struct FrameEntry {
  std::optional<Vec3> tangent;
  std::optional<Vec3> normal;
};

/// Preferred surface tensor S0 (d d^T - I/3) with d the tangent (tangential
/// anchoring) or normal (normal anchoring). Always returned in full mode since
/// its z-z entry is -S0/3.
QTensor surface_preferred(const FrameEntry& frame, double S0, Anchoring mode);

/// Per-vertex Q components stored contiguously, aligned with mesh vertices.
class NodalQField {
 public:
  NodalQField() = default;
  NodalQField(QMode mode, int vertexCount);
  /// Every vertex set to the same tensor.
  static NodalQField uniform(const QTensor& q, int vertexCount);

  QMode mode() const { return mode_; }
  int components() const { return component_count(mode_); }
  int size() const { return static_cast<int>(values_.size()) / components(); }

  QTensor at(int vertex) const;
  void set(int vertex, const QTensor& q);

  std::span<double> comps(int vertex) { return {values_.data() + vertex * components(), static_cast<std::size_t>(components())}; }
  std::span<const double> comps(int vertex) const {
    return {values_.data() + vertex * components(), static_cast<std::size_t>(components())};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const NodalQField& o) const = default;

 private:
  QMode mode_ = QMode::planar;
  std::vector<double> values_;
};

/// Copies coarse values to copied vertices and averages the two parent values
/// at edge midpoints.
NodalQField prolong(const NodalQField& field, const RefinementMap& map);

}  // namespace tactoid
