#include "tactoid/optim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tactoid {

namespace {

// Nondecreasing l1 penalty bounded below by both multiplier estimates.
double penalty(double muPrev, double lambda, double dLambda, double rho) {
  return std::max(muPrev, std::max(std::abs(lambda), std::abs(lambda + dLambda)) + rho);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

using Eigen::VectorXd;

VectorXd to_vector(const std::vector<double>& v) { return Eigen::Map<const VectorXd>(v.data(), v.size()); }

// Backtracking from alpha = 1 until phi(alpha) <= phi0 + eta alpha slope.
LineSearchResult backtrack(const std::function<double(double)>& phi, double phi0, double slope, double eta,
                           double shrink, double minStep, double alpha = 1.0) {
  LineSearchResult r;
  for (; alpha >= minStep; alpha *= shrink) {
    const double v = phi(alpha);
    ++r.evaluations;
    if (std::isfinite(v) && v <= phi0 + eta * alpha * slope) {
      r.alpha = alpha;
      r.value = v;
      r.ok = true;
      return r;
    }
  }
  return r;
}

double energy_or_inf(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params) {
  if (!all_elements_positive(mesh)) return kInf;
  try {
    return energy(mesh, field, params).total;
  } catch (const MeshError&) {
    return kInf;
  }
}

void add_to_positions(SimplicialMesh& mesh, const VectorXd& base, const VectorXd& d, double alpha) {
  set_positions(mesh, base + alpha * d);
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::maxIterations: return "max_iterations";
    case Termination::lineSearchFailure: return "line_search_failure";
    case Termination::kktFailure: return "kkt_failure";
    case Termination::reprojectionFailure: return "reprojection_failure";
    case Termination::notRun: return "not_run";
  }
  return "unknown";
}

VectorXd positions_vector(const SimplicialMesh& mesh) {
  const int d = mesh.dimension;
  VectorXd x(static_cast<Eigen::Index>(mesh.vertexCount()) * d);
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    for (int i = 0; i < d; ++i) x[v * d + i] = mesh.vertices[v][i];
  }
  return x;
}

void set_positions(SimplicialMesh& mesh, const VectorXd& x) {
  const int d = mesh.dimension;
  if (x.size() != static_cast<Eigen::Index>(mesh.vertexCount()) * d) throw std::invalid_argument("position vector size");
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    for (int i = 0; i < d; ++i) mesh.vertices[v][i] = x[v * d + i];
  }
}

VectorXd project_tangent(const VectorXd& g, const VectorXd& c) {
  const double cc = c.squaredNorm();
  if (std::sqrt(cc) < 1e-14) throw std::invalid_argument("project_tangent: constraint gradient vanishes");
  return g - (g.dot(c) / cc) * c;
}

SimplicialMesh reproject(const SimplicialMesh& mesh, const MaterialParams& params, double tol, int maxSteps,
                         std::vector<double>* residuals) {
  SimplicialMesh out = mesh;
  double C = constraint(out, params);
  if (residuals) residuals->assign(1, std::abs(C));
  for (int step = 0; step < maxSteps; ++step) {
    if (std::abs(C) <= tol * params.targetMeasure) return out;
    const VectorXd c = to_vector(constraint_grad(out));
    const double cc = c.squaredNorm();
    if (std::sqrt(cc) < 1e-14) throw std::runtime_error("reproject: constraint gradient vanishes");
    const VectorXd x = positions_vector(out);
    // Newton step along c; halve if it does not reduce |C| or inverts an element
    double t = -C / cc;
    bool ok = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      set_positions(out, x + t * c);
      if (!all_elements_positive(out)) continue;
      const double Cn = constraint(out, params);
      if (std::abs(Cn) < std::abs(C)) {
        C = Cn;
        ok = true;
        break;
      }
    }
    if (!ok) throw std::runtime_error("reproject: no step reduces the constraint violation");
    if (residuals) residuals->push_back(std::abs(C));
  }
  if (std::abs(C) <= tol * params.targetMeasure) return out;
  throw std::runtime_error("reproject: not converged within " + std::to_string(maxSteps) + " steps");
}

bool converged(const SolveTrace& trace, const ConvergenceSpec& spec) {
  if (trace.records.empty()) return false;
  const double prev = trace.records.size() >= 2 ? trace.records[trace.records.size() - 2].energy : trace.initialEnergy;
  const double cur = trace.records.back().energy;
  if (prev == cur) return true;
  return std::abs(cur - prev) / std::abs(prev) < spec.tol;
}

// --- gradient descent -------------------------------------------------------

SolveResult gd_solve(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                     const GDConfig& cfg, const DofMask& mask, const ConvergenceSpec& conv) {
  if (!mask.freeShape && !mask.freeField) throw std::invalid_argument("DofMask: nothing to optimize");
  SolveResult res{mesh, field, 0.0, {}};
  SolveTrace& trace = res.trace;
  if (mask.freeShape && std::abs(constraint(res.mesh, params)) > cfg.reprojectionTol * params.targetMeasure) {
    try {
      res.mesh = reproject(res.mesh, params, cfg.reprojectionTol, cfg.reprojectionMaxSteps);
    } catch (const std::runtime_error& e) {
      trace.termination = Termination::reprojectionFailure;
      trace.message = e.what();
      return res;
    }
  }
  GradientVector g;
  double F = energy_and_grad(res.mesh, res.field, params, g);
  trace.initialEnergy = F;
  double beta = cfg.beta0;
  double alpha = cfg.alpha0;

  for (int outer = 1; outer <= conv.maxIterations; ++outer) {
    IterationRecord rec;
    rec.iteration = outer;
    bool failed = false;
    if (mask.freeField) {
      for (int k = 0; k < cfg.fieldSteps; ++k) {
        const VectorXd gq = to_vector(g.qPart);
        const double gg = gq.squaredNorm();
        if (gg == 0.0) break;
        const VectorXd q0 = to_vector(res.field.values());
        NodalQField trial = res.field;
        auto phi = [&](double b) {
          Eigen::Map<VectorXd>(trial.values().data(), q0.size()) = q0 - b * gq;
          return energy_or_inf(res.mesh, trial, params);
        };
        const LineSearchResult ls =
            backtrack(phi, F, -gg, cfg.eta, cfg.shrink, 1e-14 * cfg.beta0, std::min(2.0 * beta, 1e6 * cfg.beta0));
        if (!ls.ok) {
          failed = true;
          break;
        }
        beta = ls.alpha;
        Eigen::Map<VectorXd>(res.field.values().data(), q0.size()) = q0 - beta * gq;
        F = energy_and_grad(res.mesh, res.field, params, g);
        rec.alphaQ = beta;
      }
    }
    rec.energyAfterField = F;
    rec.meritBefore = F;
    if (mask.freeShape && !failed) {
      for (int k = 0; k < cfg.shapeSteps; ++k) {
        const VectorXd gx = to_vector(g.xPart);
        const VectorXd c = to_vector(constraint_grad(res.mesh));
        const VectorXd p = project_tangent(gx, c);
        const double pp = p.squaredNorm();
        if (pp == 0.0) break;
        const VectorXd x0 = positions_vector(res.mesh);
        SimplicialMesh accepted;
        auto phi = [&](double a) {
          SimplicialMesh trial = res.mesh;
          set_positions(trial, x0 - a * p);
          if (!all_elements_positive(trial)) return kInf;
          try {
            trial = reproject(trial, params, cfg.reprojectionTol, cfg.reprojectionMaxSteps);
          } catch (const std::runtime_error&) {
            return kInf;
          }
          const double v = energy_or_inf(trial, res.field, params);
          if (std::isfinite(v)) accepted = std::move(trial);
          return v;
        };
        const LineSearchResult ls =
            backtrack(phi, F, -pp, cfg.eta, cfg.shrink, 1e-14 * cfg.alpha0, std::min(2.0 * alpha, 1e6 * cfg.alpha0));
        if (!ls.ok) {
          failed = true;
          break;
        }
        alpha = ls.alpha;
        res.mesh = std::move(accepted);
        F = energy_and_grad(res.mesh, res.field, params, g);
        rec.alphaM = alpha;
      }
      rec.meritAfter = F;
      if (!failed && cfg.equiangulateEvery > 0 && outer % cfg.equiangulateEvery == 0 && res.mesh.dimension == 2) {
        int flips = 0;
        SimplicialMesh eq = equiangulate(res.mesh, &flips);
        if (flips > 0) {
          res.mesh = std::move(eq);
          F = energy_and_grad(res.mesh, res.field, params, g);
        }
      }
    }
    if (!mask.freeShape || failed) rec.meritAfter = F;
    rec.energy = F;
    rec.absC = std::abs(constraint(res.mesh, params));
    rec.gradNormX = to_vector(g.xPart).norm();
    rec.gradNormQ = to_vector(g.qPart).norm();
    trace.records.push_back(rec);
    if (failed) {
      trace.termination = Termination::lineSearchFailure;
      trace.message = "no admissible step above 1e-14";
      return res;
    }
    const bool feasible = !mask.freeShape || rec.absC <= conv.feasibilityTol * params.targetMeasure;
    if (converged(trace, conv) && feasible) {
      trace.termination = Termination::converged;
      return res;
    }
  }
  trace.termination = Termination::maxIterations;
  return res;
}

// --- limited-memory BFGS ----------------------------------------------------

bool LbfgsHistory::push(const VectorXd& s, const VectorXd& y, double eps) {
  const double sy = s.dot(y);
  if (!(sy > eps * s.norm() * y.norm())) return false;
  pairs_.push_back({s, y, 1.0 / sy});
  while (static_cast<int>(pairs_.size()) > memory_) pairs_.pop_front();
  return true;
}

VectorXd lbfgs_apply(const LbfgsHistory& history, const VectorXd& v, double delta, InitialScaling scaling,
                     int split) {
  const auto& pairs = history.pairs();
  const int m = static_cast<int>(pairs.size());
  VectorXd q = v;
  std::vector<double> a(m);
  for (int i = m - 1; i >= 0; --i) {
    a[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= a[i] * pairs[i].y;
  }
  VectorXd r = delta * q;
  if (m > 0 && scaling == InitialScaling::gamma) {
    r = (pairs.back().s.dot(pairs.back().y) / pairs.back().y.squaredNorm()) * q;
  } else if (m > 0 && scaling == InitialScaling::blockGamma) {
    const VectorXd& s = pairs.back().s;
    const VectorXd& y = pairs.back().y;
    const Eigen::Index n = v.size();
    const Eigen::Index blocks[2][2] = {{0, split}, {split, n - split}};
    const double whole = s.dot(y) / y.squaredNorm();
    for (const auto& b : blocks) {
      if (b[1] == 0) continue;
      const double yy = y.segment(b[0], b[1]).squaredNorm();
      const double sy = s.segment(b[0], b[1]).dot(y.segment(b[0], b[1]));
      // fall back to the global gamma when a block carries no curvature
      const double gamma = (yy > 0.0 && sy > 0.0) ? sy / yy : whole;
      r.segment(b[0], b[1]) = gamma * q.segment(b[0], b[1]);
    }
  }
  for (int i = 0; i < m; ++i) {
    const double b = pairs[i].rho * pairs[i].y.dot(r);
    r += (a[i] - b) * pairs[i].s;
  }
  return r;
}

KKTSolution solve_kkt(const LinearOperator& applyH, const VectorXd& A, const VectorXd& R, double C, int nShape) {
  const VectorXd HA = applyH(A);
  const VectorXd HR = applyH(R);
  const double schur = A.dot(HA);
  if (!(schur > 0.0) || !std::isfinite(schur)) throw std::runtime_error("solve_kkt: nonpositive Schur complement");
  KKTSolution sol;
  sol.dLambda = -(C + A.dot(HR)) / schur;
  const VectorXd d = HR + sol.dLambda * HA;
  sol.dM = d.head(nShape);
  sol.dQ = d.tail(d.size() - nShape);
  return sol;
}

// --- mesh-level line searches ---------------------------------------------

LineSearchResult armijo_q(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                          const VectorXd& dQ, double F0, double slope, double eta, double shrink, double minStep) {
  if (dQ.size() != static_cast<Eigen::Index>(field.values().size())) throw std::invalid_argument("armijo_q: size");
  const VectorXd q0 = to_vector(field.values());
  NodalQField trial = field;
  auto phi = [&](double a) {
    Eigen::Map<VectorXd>(trial.values().data(), q0.size()) = q0 + a * dQ;
    return energy_or_inf(mesh, trial, params);
  };
  return backtrack(phi, F0, slope, eta, shrink, minStep);
}

MeritSearchResult merit_search_x(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                                 const VectorXd& dM, double dLambda, double lambda, double F0, const VectorXd& gx,
                                 double eta, double rho, double muPrev, double shrink, double minStep) {
  MeritSearchResult out;
  out.mu = penalty(muPrev, lambda, dLambda, rho);
  const double C0 = std::abs(constraint(mesh, params));
  out.model = gx.dot(dM) - out.mu * C0;
  const VectorXd x0 = positions_vector(mesh);
  SimplicialMesh trial = mesh;
  auto phi = [&](double a) {
    add_to_positions(trial, x0, dM, a);
    const double F = energy_or_inf(trial, field, params);
    return F + out.mu * std::abs(constraint(trial, params));
  };
  out.search = backtrack(phi, F0 + out.mu * C0, out.model, eta, shrink, minStep);
  return out;
}

// --- SQP driver ------------------------------------------------------------

SqpResult sqp_solve(SqpProblem& problem, const VectorXd& z0, double lambda0, const QNConfig& cfg,
                    const ConvergenceSpec& conv) {
  const int nS = problem.shapeSize();
  const int nF = problem.fieldSize();
  const int n = nS + nF;
  if (z0.size() != n) throw std::invalid_argument("sqp_solve: initial vector size");
  if (n == 0) throw std::invalid_argument("sqp_solve: nothing to optimize");
  const bool constrained = problem.constrained() && nS > 0;

  SqpResult res;
  res.z = z0;
  res.lambda = constrained ? lambda0 : 0.0;
  SolveTrace& trace = res.trace;
  LbfgsHistory history(cfg.memory);
  double mu = 0.0;

  VectorXd g(n);
  double F = problem.valueAndGradient(res.z, g);
  if (!std::isfinite(F)) throw std::invalid_argument("sqp_solve: initial point is inadmissible");
  trace.initialEnergy = F;

  auto lagrangian_grad = [&](const VectorXd& grad, const VectorXd& c, double lam) -> VectorXd {
    return constrained ? VectorXd(grad - lam * c) : grad;
  };

  for (int it = 1; it <= conv.maxIterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    const VectorXd zOld = res.z;
    const VectorXd gOld = g;
    const double C = constrained ? problem.constraintValue(res.z) : 0.0;
    const VectorXd cOld = constrained ? problem.constraintGradient(res.z) : VectorXd::Zero(n);
    const VectorXd R = -lagrangian_grad(g, cOld, res.lambda);
    rec.gradNormX = gOld.head(nS).norm();
    rec.gradNormQ = gOld.tail(nF).norm();

    auto applyH = [&](const VectorXd& v) { return lbfgs_apply(history, v, cfg.delta, cfg.scaling, nS); };
    auto solve = [&]() {
      KKTSolution sol;
      if (constrained) {
        sol = solve_kkt(applyH, cOld, R, C, nS);
      } else {
        const VectorXd d = applyH(R);
        sol.dM = d.head(nS);
        sol.dQ = d.tail(nF);
      }
      return sol;
    };

    KKTSolution sol;
    try {
      sol = solve();
    } catch (const std::runtime_error& e) {
      trace.termination = Termination::kktFailure;
      trace.message = e.what();
      return res;
    }

    // field block: Armijo on F at fixed shape
    VectorXd z = res.z;
    double Fmid = F;
    if (nF > 0) {
      double slope = g.tail(nF).dot(sol.dQ);
      LineSearchResult ls;
      auto phiQ = [&](double a) {
        VectorXd t = res.z;
        t.tail(nF) += a * sol.dQ;
        return problem.value(t);
      };
      if (slope < 0.0) ls = backtrack(phiQ, F, slope, cfg.eta, cfg.shrink, cfg.minStep);
      if (!ls.ok && !history.empty()) {
        history.clear();
        rec.historyReset = true;
        sol = solve();
        slope = g.tail(nF).dot(sol.dQ);
        if (slope < 0.0) ls = backtrack(phiQ, F, slope, cfg.eta, cfg.shrink, cfg.minStep);
      }
      if (!ls.ok && slope < 0.0) {
        trace.termination = Termination::lineSearchFailure;
        trace.message = "field line search failed at iteration " + std::to_string(it);
        return res;
      }
      if (ls.ok) {
        z.tail(nF) += ls.alpha * sol.dQ;
        Fmid = ls.value;
        rec.alphaQ = ls.alpha;
      }
    }
    rec.energyAfterField = Fmid;

    // shape block and multiplier: l1 merit at the updated field
    double Fnew = Fmid;
    VectorXd gNew(n);
    bool stationaryShape = false;
    if (nS > 0) {
      VectorXd gMid(n);
      if (nF > 0 && rec.alphaQ > 0.0) {
        problem.valueAndGradient(z, gMid);
      } else {
        gMid = g;
      }
      const double Cabs = std::abs(C);
      auto shape_search = [&](const VectorXd& dM, double dLambda, double& model, double& muUsed) {
        muUsed = constrained ? penalty(mu, res.lambda, dLambda, cfg.rho) : 0.0;
        model = gMid.head(nS).dot(dM) - muUsed * Cabs;
        auto phi = [&](double a) {
          VectorXd t = z;
          t.head(nS) += a * dM;
          const double v = problem.value(t);
          if (!std::isfinite(v)) return kInf;
          return v + (constrained ? muUsed * std::abs(problem.constraintValue(t)) : 0.0);
        };
        rec.meritBefore = Fmid + muUsed * Cabs;
        LineSearchResult ls;
        if (model < 0.0) ls = backtrack(phi, rec.meritBefore, model, cfg.eta, cfg.shrink, cfg.minStep);
        return ls;
      };
      double model = 0.0, muUsed = 0.0;
      VectorXd dM = sol.dM;
      double dLambda = sol.dLambda;
      LineSearchResult ls = shape_search(dM, dLambda, model, muUsed);
      if (!ls.ok) {
        // retry with the shape-only system at H = delta I, which is a descent
        // direction of the merit function for mu > |lambda + dLambda|
        history.clear();
        rec.historyReset = true;
        const VectorXd Rm = -lagrangian_grad(gMid, cOld, res.lambda);
        if (constrained) {
          const VectorXd cm = cOld.head(nS);
          const KKTSolution s2 =
              solve_kkt([&](const VectorXd& v) { return VectorXd(cfg.delta * v); }, cm, Rm.head(nS), C, nS);
          dM = s2.dM;
          dLambda = s2.dLambda;
        } else {
          dM = cfg.delta * Rm.head(nS);
          dLambda = 0.0;
        }
        ls = shape_search(dM, dLambda, model, muUsed);
      }
      if (!ls.ok) {
        // a vanishing shape step at a feasible point leaves nothing to do
        if (model >= 0.0 && Cabs <= conv.feasibilityTol * problem.constraintScale()) {
          stationaryShape = true;
          ls.alpha = dM.squaredNorm() == 0.0 ? 1.0 : 0.0;  // a null direction is taken in full
          ls.value = rec.meritBefore;
          ls.ok = true;
        } else {
          res.z = z;
          trace.termination = Termination::lineSearchFailure;
          trace.message = "shape line search failed at iteration " + std::to_string(it);
          return res;
        }
      }
      mu = muUsed;
      rec.mu = mu;
      rec.meritAfter = ls.value;
      rec.alphaM = ls.alpha;
      z.head(nS) += ls.alpha * dM;
      if (constrained) res.lambda += ls.alpha * dLambda;
    }
    Fnew = problem.valueAndGradient(z, gNew);
    if (nS == 0) {
      rec.meritBefore = Fmid;
      rec.meritAfter = Fnew;
    }

    // curvature pair with both gradients taken at the new multiplier
    const VectorXd cNew = constrained ? problem.constraintGradient(z) : VectorXd::Zero(n);
    const VectorXd s = z - zOld;
    const VectorXd y = lagrangian_grad(gNew, cNew, res.lambda) - lagrangian_grad(gOld, cOld, res.lambda);
    history.push(s, y, cfg.curvatureEps);

    res.z = z;
    g = gNew;
    F = Fnew;
    rec.energy = F;
    rec.absC = constrained ? std::abs(problem.constraintValue(z)) : 0.0;
    rec.lambda = res.lambda;
    trace.records.push_back(rec);

    const bool feasible = !constrained || rec.absC <= conv.feasibilityTol * problem.constraintScale();
    if ((!rec.historyReset || stationaryShape) && feasible && converged(trace, conv)) {
      trace.termination = Termination::converged;
      return res;
    }
  }
  trace.termination = Termination::maxIterations;
  return res;
}

namespace {

class TactoidProblem : public SqpProblem {
 public:
  TactoidProblem(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                 const DofMask& mask)
      : mesh_(mesh), field_(field), params_(params), mask_(mask) {
    nS_ = mask.freeShape ? mesh.vertexCount() * mesh.dimension : 0;
    nF_ = mask.freeField ? static_cast<int>(field.values().size()) : 0;
  }

  int shapeSize() const override { return nS_; }
  int fieldSize() const override { return nF_; }
  bool constrained() const override { return mask_.freeShape; }
  double constraintScale() const override { return params_.targetMeasure; }

  VectorXd pack() const {
    VectorXd z(nS_ + nF_);
    if (nS_ > 0) z.head(nS_) = positions_vector(mesh_);
    if (nF_ > 0) z.tail(nF_) = to_vector(field_.values());
    return z;
  }

  void unpack(const VectorXd& z) {
    if (nS_ > 0) set_positions(mesh_, z.head(nS_));
    if (nF_ > 0) Eigen::Map<VectorXd>(field_.values().data(), nF_) = z.tail(nF_);
  }

  double value(const VectorXd& z) override {
    unpack(z);
    return energy_or_inf(mesh_, field_, params_);
  }

  double valueAndGradient(const VectorXd& z, VectorXd& g) override {
    unpack(z);
    g.resize(nS_ + nF_);
    if (!all_elements_positive(mesh_)) return kInf;
    const double F = energy_and_grad(mesh_, field_, params_, grad_);
    if (nS_ > 0) g.head(nS_) = to_vector(grad_.xPart);
    if (nF_ > 0) g.tail(nF_) = to_vector(grad_.qPart);
    return F;
  }

  double constraintValue(const VectorXd& z) override {
    unpack(z);
    return constraint(mesh_, params_);
  }

  VectorXd constraintGradient(const VectorXd& z) override {
    unpack(z);
    VectorXd c = VectorXd::Zero(nS_ + nF_);
    if (nS_ > 0) c.head(nS_) = to_vector(constraint_grad(mesh_));
    return c;
  }

  const SimplicialMesh& mesh() const { return mesh_; }
  const NodalQField& field() const { return field_; }

 private:
  SimplicialMesh mesh_;
  NodalQField field_;
  MaterialParams params_;
  DofMask mask_;
  GradientVector grad_;
  int nS_ = 0;
  int nF_ = 0;
};

}  // namespace

SolveResult qn_solve(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params,
                     const QNConfig& cfg, const DofMask& mask, const ConvergenceSpec& conv, double lambda0) {
  if (!mask.freeShape && !mask.freeField) throw std::invalid_argument("DofMask: nothing to optimize");
  TactoidProblem problem(mesh, field, params, mask);
  SqpResult r = sqp_solve(problem, problem.pack(), lambda0, cfg, conv);
  problem.unpack(r.z);
  SolveResult out{problem.mesh(), problem.field(), r.lambda, std::move(r.trace)};
  // masked blocks are returned exactly as given
  if (!mask.freeShape) out.mesh = mesh;
  if (!mask.freeField) out.field = field;
  return out;
}

}  // namespace tactoid
