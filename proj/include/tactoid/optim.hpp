#pragma once

#include <Eigen/Dense>

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "tactoid/energy.hpp"

namespace tactoid {

/// Which blocks of unknowns move. Fixed shape is Subproblem A, fixed field Subproblem B.
struct DofMask {
  bool freeShape = true;
  bool freeField = true;
};

struct GDConfig {
  double alpha0 = 1e-2;  // shape step
  double beta0 = 1.0;    // field step
  double shrink = 0.5;
  double eta = 1e-4;
  double reprojectionTol = 1e-10;  // relative to the target measure
  int reprojectionMaxSteps = 50;
  int equiangulateEvery = 1;  // outer iterations between quality passes, 0 disables
  int fieldSteps = 10;
  int shapeSteps = 10;
};

/// Initial inverse-Hessian matrix of the two-loop recursion: delta I, gamma I
/// with gamma = s^T y / y^T y of the newest pair, or one such gamma per block
/// (shape, field) computed from the block slices of s and y.
enum class InitialScaling { fixed, gamma, blockGamma };

struct QNConfig {
  double delta = 1.0;
  int memory = 20;
  double eta = 1e-4;
  double shrink = 0.5;
  double rho = 1.0;
  double curvatureEps = 1e-10;
  double minStep = 1e-14;
  InitialScaling scaling = InitialScaling::blockGamma;
};

struct ConvergenceSpec {
  double tol = 1e-6;
  int maxIterations = 5000;
  /// |C| must also be below feasibilityTol * targetMeasure for a free shape.
  double feasibilityTol = 1e-6;
};

struct KKTSolution {
  Eigen::VectorXd dM;
  Eigen::VectorXd dQ;
  double dLambda = 0.0;
};

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;         // F after the accepted updates
  double energyAfterField = 0.0;
  double meritBefore = 0.0;    // phi at (x, Q_new) with the mu of this iteration
  double meritAfter = 0.0;     // gradient descent: F before equiangulation
  double mu = 0.0;
  double absC = 0.0;
  double alphaM = 0.0;
  double alphaQ = 0.0;
  double gradNormX = 0.0;
  double gradNormQ = 0.0;
  double lambda = 0.0;
  bool historyReset = false;
};

enum class Termination { converged, maxIterations, lineSearchFailure, kktFailure, reprojectionFailure, notRun };

std::string to_string(Termination t);

struct SolveTrace {
  double initialEnergy = 0.0;
  std::vector<IterationRecord> records;
  Termination termination = Termination::notRun;
  std::string message;

  int iterations() const { return static_cast<int>(records.size()); }
  double finalEnergy() const { return records.empty() ? initialEnergy : records.back().energy; }
};

// --- shared building blocks ---------------------------------------------------

/// g - (g.c / c.c) c. Throws std::invalid_argument when |c| < 1e-14.
Eigen::VectorXd project_tangent(const Eigen::VectorXd& g, const Eigen::VectorXd& c);

/// Moves vertices along the constraint gradient until |C| <= tol * targetMeasure.
/// Throws std::runtime_error when maxSteps is exhausted or a step inverts an element.
SimplicialMesh reproject(const SimplicialMesh& mesh, const MaterialParams& params, double tol, int maxSteps,
                         std::vector<double>* residuals = nullptr);

/// |F_k - F_{k-1}| / |F_{k-1}| < tol over the last two recorded energies
/// (the initial energy counts as F_0).
bool converged(const SolveTrace& trace, const ConvergenceSpec& spec);

Eigen::VectorXd positions_vector(const SimplicialMesh& mesh);
void set_positions(SimplicialMesh& mesh, const Eigen::VectorXd& x);

// --- gradient descent -----------------------------------------------------------

struct SolveResult {
  SimplicialMesh mesh;
  NodalQField field;
  double lambda = 0.0;
  SolveTrace trace;
};

/// Alternating blocks of field and shape steepest-descent steps with
/// backtracking; shape steps are projected onto the constraint tangent and
/// followed by reprojection.
SolveResult gd_solve(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                     const GDConfig& cfg, const DofMask& mask, const ConvergenceSpec& conv);

// --- quasi-Newton SQP -----------------------------------------------------------

struct LbfgsPair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho = 0.0;  // 1 / s^T y
};

class LbfgsHistory {
 public:
  explicit LbfgsHistory(int memory = 20) : memory_(memory) {}
  /// Stores the pair unless s^T y <= eps |s| |y|; returns whether it was kept.
  bool push(const Eigen::VectorXd& s, const Eigen::VectorXd& y, double eps);
  void clear() { pairs_.clear(); }
  const std::deque<LbfgsPair>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }

 private:
  int memory_;
  std::deque<LbfgsPair> pairs_;
};

/// H v by the two-loop recursion. `split` is the length of the shape block,
/// used by blockGamma. An empty history gives delta v.
Eigen::VectorXd lbfgs_apply(const LbfgsHistory& history, const Eigen::VectorXd& v, double delta,
                            InitialScaling scaling = InitialScaling::fixed, int split = 0);

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Solves the saddle-point system [B, -A^T; -A, 0] [d; dl] = [R; C] with
/// B^{-1} = applyH. nShape leading entries of d form dM, the rest dQ.
/// Throws std::runtime_error when A H A^T <= 0.
KKTSolution solve_kkt(const LinearOperator& applyH, const Eigen::VectorXd& A, const Eigen::VectorXd& R, double C,
                      int nShape);

struct LineSearchResult {
  double alpha = 0.0;
  double value = 0.0;  // objective (F or merit) at the accepted point
  int evaluations = 0;
  bool ok = false;
};

/// Backtracking on F(x, Q + a dQ) <= F(x, Q) + eta a gQ.dQ from a = 1.
LineSearchResult armijo_q(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                          const Eigen::VectorXd& dQ, double F0, double slope, double eta, double shrink = 0.5,
                          double minStep = 1e-14);

struct MeritSearchResult {
  LineSearchResult search;
  double mu = 0.0;
  double model = 0.0;  // directional model gx.dM - mu |C|
};

/// mu = max(muPrev, max(|lambda|, |lambda + dLambda|) + rho), then backtracking
/// on phi = F + mu |C| along dM with the directional model gx.dM - mu |C|.
/// Trials that invert an element count as phi = +inf.
MeritSearchResult merit_search_x(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                                 const Eigen::VectorXd& dM, double dLambda, double lambda, double F0,
                                 const Eigen::VectorXd& gx, double eta, double rho, double muPrev,
                                 double shrink = 0.5, double minStep = 1e-14);

/// Smooth objective over z = [shape block; field block] with at most one
/// equality constraint that depends on the shape block only.
class SqpProblem {
 public:
  virtual ~SqpProblem() = default;
  virtual int shapeSize() const = 0;
  virtual int fieldSize() const = 0;
  virtual bool constrained() const = 0;
  /// +inf for inadmissible points (inverted elements).
  virtual double value(const Eigen::VectorXd& z) = 0;
  virtual double valueAndGradient(const Eigen::VectorXd& z, Eigen::VectorXd& g) = 0;
  virtual double constraintValue(const Eigen::VectorXd& z) = 0;
  /// Full-length vector, zero on the field block.
  virtual Eigen::VectorXd constraintGradient(const Eigen::VectorXd& z) = 0;
  /// Scale for the feasibility test of the convergence check.
  virtual double constraintScale() const { return 1.0; }
};

struct SqpResult {
  Eigen::VectorXd z;
  double lambda = 0.0;
  SolveTrace trace;
};

/// Quasi-Newton SQP with limited-memory BFGS, started from an empty history.
/// Field and shape blocks are line-searched separately (Gauss-Seidel): the
/// field on F, then the shape with the multiplier on the l1 merit function.
SqpResult sqp_solve(SqpProblem& problem, const Eigen::VectorXd& z0, double lambda0, const QNConfig& cfg,
                    const ConvergenceSpec& conv);

/// sqp_solve on the tactoid energy with the masked blocks frozen.
SolveResult qn_solve(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                     const QNConfig& cfg, const DofMask& mask, const ConvergenceSpec& conv, double lambda0 = 0.0);

}  // namespace tactoid
