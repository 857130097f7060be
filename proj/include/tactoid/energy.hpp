#pragma once

#include <vector>

#include "tactoid/mesh.hpp"
#include "tactoid/qfield.hpp"

namespace tactoid {

/// Nondimensional coefficients of the free energy.
struct MaterialParams {
  int dimension = 2;
  double a = -4.2;
  double b = -640.0;
  double c = 350.0;
  double tau = 10.0;
  double omega = 0.0;
  double S0 = 0.933567;
  double targetMeasure = 1.0;
  Anchoring anchoring = Anchoring::tangential;
  /// When false the isotropic surface term is left out of the functional.
  /// Used for fixed-shape solves, where it is a constant.
  bool surfaceTension = true;

  QMode qmode() const { return dimension == 2 ? QMode::planar : QMode::full; }
  double anchoringSign() const { return anchoring == Anchoring::tangential ? 1.0 : -1.0; }
};

/// Defaults for the planar (2D, tangential) and full (3D, normal) setups.
MaterialParams default_params(int dimension);

/// SI inputs; a is either given directly or through a0 (T - T0) when useTemperature is set.
struct DimensionalParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double sigma = 0.0;
  double W = 0.0;
  double L1 = 0.0;
  double xi = 0.0;
  double a0 = 0.0;
  double T = 0.0;
  double T0 = 0.0;
  bool useTemperature = false;
};

struct EnergyBreakdown {
  double bulkLandau = 0.0;
  double elastic = 0.0;
  double isotropicSurface = 0.0;
  double anchoring = 0.0;
  double total = 0.0;
};

/// Derivatives with respect to vertex positions (dimension entries per vertex)
/// and nodal Q components (component_count entries per vertex).
struct GradientVector {
  int dimension = 2;
  int qComponents = 2;
  std::vector<double> xPart;
  std::vector<double> qPart;

  int vertexCount() const { return static_cast<int>(xPart.size()) / dimension; }
};

/// Landau, tension and anchoring coefficients with the xi scaling of the given
/// dimension. Sets S0 from the Landau coefficients when they admit a nematic minimum.
MaterialParams nondimensionalize(const DimensionalParams& p, int dimension);

/// S0 = (-b + sqrt(b^2 - 24 a c)) / (4 c). Throws std::domain_error on a
/// negative discriminant or c <= 0.
double critical_order(double a, double b, double c);

/// Uniaxial reduction g(S) = (2a/3) S^2 + (4b/27) S^3 + (2c/9) S^4.
double uniaxial_bulk(double S, double a, double b, double c);

double bulk_density(const QTensor& q, const MaterialParams& params);

/// Element-parallel assembly settings. Elements are split into fixed chunks
/// reduced in chunk order, so results do not depend on the thread count.
struct AssemblyOptions {
  int threads = 1;
};
void set_assembly_options(const AssemblyOptions& options);
AssemblyOptions assembly_options();

EnergyBreakdown energy(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params);
/// Same as energy(...).total but also fills the gradient.
double energy_and_grad(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                       GradientVector& grad, EnergyBreakdown* parts = nullptr);
GradientVector grad(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params);

/// total_measure(mesh) - targetMeasure.
double constraint(const SimplicialMesh& mesh, const MaterialParams& params);
/// d(total measure)/dx, dimension entries per vertex.
std::vector<double> constraint_grad(const SimplicialMesh& mesh);

/// Central differences of energy(...).total, one coordinate at a time.
GradientVector fd_gradient(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                           double h);
/// Central differences of constraint(...).
std::vector<double> fd_constraint_grad(const SimplicialMesh& mesh, double h);

}  // namespace tactoid
