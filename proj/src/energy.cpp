#include "tactoid/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace tactoid {

namespace {

AssemblyOptions g_assembly;

constexpr int kChunk = 256;

template <int D, int K>
struct ElementResult {
  double bulk = 0.0;
  double elastic = 0.0;
  Eigen::Matrix<double, D + 1, D> dx;
  Eigen::Matrix<double, D + 1, K> dq;
};

struct BulkTerms {
  double f;
  Eigen::Matrix3d dfdQ;
};

BulkTerms bulk_terms(const Eigen::Matrix3d& Q, const MaterialParams& p) {
  const Eigen::Matrix3d Q2 = Q * Q;
  const double tr2 = Q2.trace();
  const double tr3 = (Q2 * Q).trace();
  return {p.a * tr2 + (2.0 * p.b / 3.0) * tr3 + 0.5 * p.c * tr2 * tr2,
          2.0 * p.a * Q + 2.0 * p.b * Q2 + 2.0 * p.c * tr2 * Q};
}

template <int K>
Eigen::Matrix<double, K, 1> project_onto_basis(const Eigen::Matrix3d& m, QMode mode) {
  const auto& basis = embedding_basis(mode);
  Eigen::Matrix<double, K, 1> out;
  for (int k = 0; k < K; ++k) out[k] = (m.array() * basis[k].array()).sum();
  return out;
}

Eigen::Matrix3d embed_raw(const double* c, QMode mode) {
  const auto& basis = embedding_basis(mode);
  Eigen::Matrix3d m = embedding_offset(mode);
  for (int k = 0; k < component_count(mode); ++k) m += c[k] * basis[k];
  return m;
}

template <int D, int K>
void element_kernel(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& p, int e,
                    bool wantGrad, ElementResult<D, K>& out) {
  const QMode mode = field.mode();
  const auto& el = mesh.elements[e];
  const auto& xs = mesh.vertices;
  Eigen::Matrix<double, D, D> E;
  for (int i = 0; i < D; ++i) E.row(i) = (xs[el[i + 1]] - xs[el[0]]).template head<D>().transpose();
  const double det = E.determinant();
  if (!(det > 0.0)) throw MeshError("element " + std::to_string(e) + " has nonpositive measure");
  const double vol = det / (D == 2 ? 2.0 : 6.0);
  const Eigen::Matrix<double, D, D> G = E.inverse().transpose();
  Eigen::Matrix<double, D + 1, D> phi;
  phi.row(0) = -G.colwise().sum();
  phi.template bottomRows<D>() = G;

  Eigen::Matrix<double, D + 1, K> q;
  for (int v = 0; v <= D; ++v) {
    const auto c = field.comps(el[v]);
    for (int k = 0; k < K; ++k) q(v, k) = c[k];
  }

  double fsum = 0.0;
  for (int v = 0; v <= D; ++v) {
    std::array<double, K> cv;
    for (int k = 0; k < K; ++k) cv[k] = q(v, k);
    const BulkTerms bt = bulk_terms(embed_raw(cv.data(), mode), p);
    fsum += bt.f;
    if (wantGrad) out.dq.row(v) = (vol / (D + 1)) * project_onto_basis<K>(bt.dfdQ, mode).transpose();
  }
  out.bulk = vol * fsum / (D + 1);

  const Eigen::Matrix<double, K, K> metric = embedding_metric(mode).template topLeftCorner<K, K>();
  const Eigen::Matrix<double, K, D> g = q.transpose() * phi;
  const Eigen::Matrix<double, K, D> h = metric * g;
  const Eigen::Matrix<double, D, D> P = g.transpose() * h;
  const double trP = P.trace();
  out.elastic = 0.5 * vol * trP;
  if (!wantGrad) return;

  out.dq += vol * phi * h.transpose();
  const Eigen::Matrix<double, D, D> dE = (out.bulk + 0.5 * vol * trP) * G - vol * G * P;
  out.dx.row(0) = -dE.colwise().sum();
  out.dx.template bottomRows<D>() = dE;
}

template <typename F>
void parallel_chunks(int chunks, F&& body) {
  const int threads = std::max(1, std::min(g_assembly.threads, chunks));
  if (threads == 1) {
    for (int c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int c = t; c < chunks; c += threads) body(c);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

template <int D, int K>
double assemble(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& p, GradientVector* grad,
                EnergyBreakdown& parts) {
  const int ne = mesh.elementCount();
  const bool wantGrad = grad != nullptr;
  std::vector<ElementResult<D, K>> results(ne);
  const int chunks = (ne + kChunk - 1) / kChunk;
  parallel_chunks(chunks, [&](int c) {
    const int end = std::min(ne, (c + 1) * kChunk);
    for (int e = c * kChunk; e < end; ++e) element_kernel<D, K>(mesh, field, p, e, wantGrad, results[e]);
  });

  if (wantGrad) {
    grad->dimension = D;
    grad->qComponents = K;
    grad->xPart.assign(static_cast<std::size_t>(mesh.vertexCount()) * D, 0.0);
    grad->qPart.assign(static_cast<std::size_t>(mesh.vertexCount()) * K, 0.0);
  }
  parts = EnergyBreakdown{};
  for (int e = 0; e < ne; ++e) {
    const auto& r = results[e];
    parts.bulkLandau += r.bulk;
    parts.elastic += r.elastic;
    if (!wantGrad) continue;
    const auto& el = mesh.elements[e];
    for (int v = 0; v <= D; ++v) {
      for (int i = 0; i < D; ++i) grad->xPart[el[v] * D + i] += r.dx(v, i);
      for (int k = 0; k < K; ++k) grad->qPart[el[v] * K + k] += r.dq(v, k);
    }
  }

  // boundary: isotropic tension plus anchoring against the facet-wise Q_s
  const QMode mode = field.mode();
  const double W = p.anchoringSign() * 0.5 * p.tau * p.omega;
  const double tension = p.surfaceTension ? p.tau : 0.0;
  const double S0 = p.S0;
  const Anchoring anchorMode = p.anchoring;
  for (const auto& f : mesh.boundaryFacets) {
    const auto& xs = mesh.vertices;
    Vec3 dir;
    double measure;
    Vec3 rawVec;
    if (D == 2) {
      rawVec = xs[f.v[1]] - xs[f.v[0]];
      measure = rawVec.norm();
    } else {
      rawVec = (xs[f.v[1]] - xs[f.v[0]]).cross(xs[f.v[2]] - xs[f.v[0]]);
      measure = 0.5 * rawVec.norm();
    }
    if (!(measure > 0.0)) throw MeshError("degenerate boundary facet");
    const double rawNorm = rawVec.norm();
    const Vec3 unit = rawVec / rawNorm;
    // 2D: unit is the tangent; its normal (t_y, -t_x) is only needed for normal anchoring
    if (D == 2) {
      dir = anchorMode == Anchoring::tangential ? unit : Vec3(unit.y(), -unit.x(), 0.0);
    } else {
      if (anchorMode == Anchoring::tangential) {
        throw std::invalid_argument("tangential anchoring is defined for 2D meshes only");
      }
      dir = unit;
    }
    const Eigen::Matrix3d Qs = S0 * (dir * dir.transpose() - Eigen::Matrix3d::Identity() / 3.0);

    double hsum = 0.0;
    Vec3 dhdDir = Vec3::Zero();
    std::array<Eigen::Matrix3d, D> diff;
    for (int i = 0; i < D; ++i) {
      diff[i] = embed_raw(field.comps(f.v[i]).data(), mode) - Qs;
      hsum += (diff[i] * diff[i]).trace();
      dhdDir += -4.0 * S0 * diff[i] * dir;
    }
    const double weight = measure / D;
    parts.isotropicSurface += tension * measure;
    parts.anchoring += W * weight * hsum;
    if (!wantGrad) continue;

    for (int i = 0; i < D; ++i) {
      const Eigen::Matrix<double, K, 1> dq = (W * weight * 2.0) * project_onto_basis<K>(diff[i], mode);
      for (int k = 0; k < K; ++k) grad->qPart[f.v[i] * K + k] += dq[k];
    }
    // derivative with respect to rawVec (u in 2D, the doubled-area normal in 3D)
    const double dMeasure = W * hsum / D + tension;  // d(energy)/d(measure)
    const double measureScale = D == 2 ? 1.0 : 0.5;  // d(measure)/d|rawVec|
    Vec3 dDir = W * weight * dhdDir;
    if (D == 2 && anchorMode == Anchoring::normal) dDir = Vec3(-dDir.y(), dDir.x(), 0.0);  // pull back through the rotation
    const Vec3 gRaw = dMeasure * measureScale * unit + (dDir - unit * unit.dot(dDir)) / rawNorm;
    if (D == 2) {
      for (int i = 0; i < 2; ++i) {
        grad->xPart[f.v[1] * 2 + i] += gRaw[i];
        grad->xPart[f.v[0] * 2 + i] -= gRaw[i];
      }
    } else {
      const Vec3& a = xs[f.v[0]];
      const Vec3 db = (xs[f.v[2]] - a).cross(gRaw);
      const Vec3 dc = gRaw.cross(xs[f.v[1]] - a);
      for (int i = 0; i < 3; ++i) {
        grad->xPart[f.v[1] * 3 + i] += db[i];
        grad->xPart[f.v[2] * 3 + i] += dc[i];
        grad->xPart[f.v[0] * 3 + i] -= db[i] + dc[i];
      }
    }
  }
  parts.total = parts.bulkLandau + parts.elastic + parts.isotropicSurface + parts.anchoring;
  return parts.total;
}

double dispatch(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& p, GradientVector* grad,
                EnergyBreakdown& parts) {
  if (field.size() != mesh.vertexCount()) throw std::invalid_argument("field does not match the mesh vertex count");
  if (mesh.dimension == 2 && field.mode() == QMode::planar) return assemble<2, 2>(mesh, field, p, grad, parts);
  if (mesh.dimension == 2 && field.mode() == QMode::full) return assemble<2, 5>(mesh, field, p, grad, parts);
  if (mesh.dimension == 3 && field.mode() == QMode::full) return assemble<3, 5>(mesh, field, p, grad, parts);
  throw std::invalid_argument("planar Q fields require a 2D mesh");
}

}  // namespace

MaterialParams default_params(int dimension) {
  MaterialParams p;
  p.dimension = dimension;
  p.anchoring = dimension == 2 ? Anchoring::tangential : Anchoring::normal;
  p.S0 = critical_order(p.a, p.b, p.c);
  return p;
}

double critical_order(double a, double b, double c) {
  if (!(c > 0.0)) throw std::domain_error("critical_order: c must be positive");
  const double disc = b * b - 24.0 * a * c;
  if (disc < 0.0) throw std::domain_error("critical_order: negative discriminant b^2 - 24ac");
  return (-b + std::sqrt(disc)) / (4.0 * c);
}

double uniaxial_bulk(double S, double a, double b, double c) {
  return (2.0 * a / 3.0) * S * S + (4.0 * b / 27.0) * S * S * S + (2.0 * c / 9.0) * S * S * S * S;
}

MaterialParams nondimensionalize(const DimensionalParams& d, int dimension) {
  if (!(d.L1 > 0.0)) throw std::invalid_argument("L1 must be positive");
  if (!(d.xi > 0.0)) throw std::invalid_argument("xi must be positive");
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("dimension must be 2 or 3");
  if (!(d.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  MaterialParams p = default_params(dimension);
  const double landau = std::pow(d.xi, dimension) / d.L1;
  const double a = d.useTemperature ? d.a0 * (d.T - d.T0) : d.a;
  p.a = a * landau;
  p.b = d.b * landau;
  p.c = d.c * landau;
  p.tau = d.sigma * d.xi / d.L1;
  p.omega = d.W / d.sigma;
  if (p.c > 0.0 && p.b * p.b - 24.0 * p.a * p.c >= 0.0) p.S0 = critical_order(p.a, p.b, p.c);
  return p;
}

double bulk_density(const QTensor& q, const MaterialParams& params) { return bulk_terms(embed_3x3(q), params).f; }

void set_assembly_options(const AssemblyOptions& options) {
  if (options.threads < 1) throw std::invalid_argument("thread count must be at least 1");
  g_assembly = options;
}

AssemblyOptions assembly_options() { return g_assembly; }

EnergyBreakdown energy(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params) {
  EnergyBreakdown parts;
  dispatch(mesh, field, params, nullptr, parts);
  return parts;
}

double energy_and_grad(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                       GradientVector& g, EnergyBreakdown* parts) {
  EnergyBreakdown local;
  const double total = dispatch(mesh, field, params, &g, local);
  if (parts) *parts = local;
  return total;
}

GradientVector grad(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params) {
  GradientVector g;
  energy_and_grad(mesh, field, params, g);
  return g;
}

double constraint(const SimplicialMesh& mesh, const MaterialParams& params) {
  return total_measure(mesh) - params.targetMeasure;
}

std::vector<double> constraint_grad(const SimplicialMesh& mesh) {
  const int d = mesh.dimension;
  std::vector<double> out(static_cast<std::size_t>(mesh.vertexCount()) * d, 0.0);
  const auto& xs = mesh.vertices;
  for (const auto& el : mesh.elements) {
    if (d == 2) {
      // d(area)/dx_i = 0.5 * perp(x_{i+2} - x_{i+1}) for a counter-clockwise triangle
      for (int i = 0; i < 3; ++i) {
        const Vec3 e = xs[el[(i + 2) % 3]] - xs[el[(i + 1) % 3]];
        out[el[i] * 2 + 0] += -0.5 * e.y();
        out[el[i] * 2 + 1] += 0.5 * e.x();
      }
    } else {
      const Vec3 &a = xs[el[0]], &b = xs[el[1]], &c = xs[el[2]], &dd = xs[el[3]];
      const Vec3 gb = (c - a).cross(dd - a) / 6.0;
      const Vec3 gc = (dd - a).cross(b - a) / 6.0;
      const Vec3 gd = (b - a).cross(c - a) / 6.0;
      const Vec3 ga = -(gb + gc + gd);
      for (int i = 0; i < 3; ++i) {
        out[el[0] * 3 + i] += ga[i];
        out[el[1] * 3 + i] += gb[i];
        out[el[2] * 3 + i] += gc[i];
        out[el[3] * 3 + i] += gd[i];
      }
    }
  }
  return out;
}

GradientVector fd_gradient(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                           double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be positive");
  GradientVector g;
  g.dimension = mesh.dimension;
  g.qComponents = field.components();
  SimplicialMesh m = mesh;
  NodalQField q = field;
  g.xPart.resize(static_cast<std::size_t>(mesh.vertexCount()) * mesh.dimension);
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    for (int i = 0; i < mesh.dimension; ++i) {
      const double x0 = m.vertices[v][i];
      m.vertices[v][i] = x0 + h;
      const double fp = energy(m, q, params).total;
      m.vertices[v][i] = x0 - h;
      const double fm = energy(m, q, params).total;
      m.vertices[v][i] = x0;
      g.xPart[v * mesh.dimension + i] = (fp - fm) / (2.0 * h);
    }
  }
  g.qPart.resize(q.values().size());
  for (std::size_t j = 0; j < q.values().size(); ++j) {
    const double q0 = q.values()[j];
    q.values()[j] = q0 + h;
    const double fp = energy(m, q, params).total;
    q.values()[j] = q0 - h;
    const double fm = energy(m, q, params).total;
    q.values()[j] = q0;
    g.qPart[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

std::vector<double> fd_constraint_grad(const SimplicialMesh& mesh, double h) {
  SimplicialMesh m = mesh;
  std::vector<double> out(static_cast<std::size_t>(mesh.vertexCount()) * mesh.dimension);
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    for (int i = 0; i < mesh.dimension; ++i) {
      const double x0 = m.vertices[v][i];
      m.vertices[v][i] = x0 + h;
      const double fp = total_measure(m);
      m.vertices[v][i] = x0 - h;
      const double fm = total_measure(m);
      m.vertices[v][i] = x0;
      out[v * mesh.dimension + i] = (fp - fm) / (2.0 * h);
    }
  }
  return out;
}

}  // namespace tactoid
