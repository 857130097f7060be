#include "tactoid/qfield.hpp"

#include <cmath>
#include <stdexcept>

namespace tactoid {

namespace {

Eigen::Matrix3d sym(int i, int j) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(i, j) = 1.0;
  m(j, i) = 1.0;
  return m;
}

struct Embedding {
  Eigen::Matrix3d offset;
  std::array<Eigen::Matrix3d, 5> basis;
  Eigen::Matrix<double, 5, 5> metric;
};

Embedding make_embedding(QMode mode) {
  Embedding e;
  e.offset.setZero();
  for (auto& b : e.basis) b.setZero();
  if (mode == QMode::planar) {
    e.offset(1, 1) = 1.0 / 3.0;
    e.offset(2, 2) = -1.0 / 3.0;
    e.basis[0](0, 0) = 1.0;
    e.basis[0](1, 1) = -1.0;
    e.basis[1] = sym(0, 1);
  } else {
    e.basis[0](0, 0) = 1.0;
    e.basis[0](2, 2) = -1.0;
    e.basis[1] = sym(0, 1);
    e.basis[2] = sym(0, 2);
    e.basis[3](1, 1) = 1.0;
    e.basis[3](2, 2) = -1.0;
    e.basis[4] = sym(1, 2);
  }
  e.metric.setZero();
  const int k = component_count(mode);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) e.metric(i, j) = (e.basis[i].array() * e.basis[j].array()).sum();
  }
  return e;
}

const Embedding& embedding(QMode mode) {
  static const Embedding planar = make_embedding(QMode::planar);
  static const Embedding full = make_embedding(QMode::full);
  return mode == QMode::planar ? planar : full;
}

void check_unit(const Vec3& n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-12) throw std::invalid_argument("director must be a unit vector");
}

}  // namespace

const Eigen::Matrix3d& embedding_offset(QMode mode) { return embedding(mode).offset; }
const std::array<Eigen::Matrix3d, 5>& embedding_basis(QMode mode) { return embedding(mode).basis; }
const Eigen::Matrix<double, 5, 5>& embedding_metric(QMode mode) { return embedding(mode).metric; }

Eigen::Matrix3d embed_3x3(const QTensor& q) {
  const Embedding& e = embedding(q.mode);
  Eigen::Matrix3d m = e.offset;
  for (int k = 0; k < q.size(); ++k) m += q.c[k] * e.basis[k];
  return m;
}

QTensor extract_components(QMode mode, const Eigen::Matrix3d& m) {
  QTensor q;
  q.mode = mode;
  if (mode == QMode::planar) {
    q.c[0] = m(0, 0);
    q.c[1] = m(0, 1);
  } else {
    q.c = {m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2)};
  }
  return q;
}

QTensor from_director(double S, const Vec3& n, QMode mode) {
  check_unit(n);
  if (mode == QMode::planar && std::abs(n.z()) > 1e-12) {
    throw std::invalid_argument("planar director must lie in the x-y plane");
  }
  const Eigen::Matrix3d m = S * (n * n.transpose() - Eigen::Matrix3d::Identity() / 3.0);
  return extract_components(mode, m);
}

Director eigen_decompose(const QTensor& q) {
  for (int k = 0; k < q.size(); ++k) {
    if (!std::isfinite(q.c[k])) throw std::invalid_argument("eigen_decompose: non-finite component");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(embed_3x3(q));
  const Vec3 values = solver.eigenvalues();  // ascending
  Director d;
  d.S = 1.5 * values[2];
  d.n = solver.eigenvectors().col(2).normalized();
  d.degenerate = (values[2] - values[1]) < 1e-12;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d.n[i]) > 1e-12) {
      if (d.n[i] < 0.0) d.n = -d.n;
      break;
    }
  }
  return d;
}

QTensor surface_preferred(const FrameEntry& frame, double S0, Anchoring mode) {
  const std::optional<Vec3>& dir = mode == Anchoring::tangential ? frame.tangent : frame.normal;
  if (!dir) throw std::invalid_argument("surface_preferred: frame entry lacks the required direction");
  check_unit(*dir);
  const Eigen::Matrix3d m = S0 * ((*dir) * dir->transpose() - Eigen::Matrix3d::Identity() / 3.0);
  return extract_components(QMode::full, m);
}

NodalQField::NodalQField(QMode mode, int vertexCount)
    : mode_(mode), values_(static_cast<std::size_t>(vertexCount) * component_count(mode), 0.0) {}

NodalQField NodalQField::uniform(const QTensor& q, int vertexCount) {
  NodalQField f(q.mode, vertexCount);
  for (int i = 0; i < vertexCount; ++i) f.set(i, q);
  return f;
}

QTensor NodalQField::at(int vertex) const {
  QTensor q;
  q.mode = mode_;
  const int k = components();
  for (int j = 0; j < k; ++j) q.c[j] = values_[vertex * k + j];
  return q;
}

void NodalQField::set(int vertex, const QTensor& q) {
  if (q.mode != mode_) throw std::invalid_argument("NodalQField::set: mode mismatch");
  const int k = components();
  for (int j = 0; j < k; ++j) values_[vertex * k + j] = q.c[j];
}

NodalQField prolong(const NodalQField& field, const RefinementMap& map) {
  if (field.size() != map.coarseVertexCount) throw std::invalid_argument("prolong: field does not match the coarse mesh");
  NodalQField fine(field.mode(), static_cast<int>(map.provenance.size()));
  const int k = field.components();
  for (int v = 0; v < fine.size(); ++v) {
    const VertexOrigin& o = map.provenance[v];
    auto dst = fine.comps(v);
    auto a = field.comps(o.parentA);
    if (o.isMidpoint()) {
      auto b = field.comps(o.parentB);
      for (int j = 0; j < k; ++j) dst[j] = 0.5 * (a[j] + b[j]);
    } else {
      for (int j = 0; j < k; ++j) dst[j] = a[j];
    }
  }
  return fine;
}

}  // namespace tactoid
