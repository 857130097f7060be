#include "tactoid/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace tactoid {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v, int line) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line) + ": " + key + ": not a number: '" + v + "'", line);
  return out;
}

long long to_int(const std::string& key, const std::string& v, int line) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line) + ": " + key + ": not an integer: '" + v + "'", line);
  return out;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("line " + std::to_string(line) + ": " + key + ": not a boolean: '" + v + "'", line);
}

std::vector<double> to_list(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item, line));
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

const char* scaling_name(InitialScaling s) {
  switch (s) {
    case InitialScaling::fixed: return "fixed";
    case InitialScaling::gamma: return "gamma";
    case InitialScaling::blockGamma: return "block-gamma";
  }
  return "?";
}

struct Raw {
  std::string value;
  int line;
};

void validate_list(const std::vector<double>& v, const char* key) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) throw ConfigError(std::string(key) + ": omega must be ≥ 0");
    if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(std::string(key) + ": values must be strictly increasing");
  }
}

}  // namespace

std::string to_string(Problem p) {
  switch (p) {
    case Problem::full: return "full";
    case Problem::subproblemA: return "subproblem-a";
    case Problem::subproblemB: return "subproblem-b";
  }
  return "?";
}

NISchedule RunConfig::schedule() const {
  NISchedule s;
  s.levelCount = levels;
  s.solvers = {solver};
  s.omegaContinuation = omegaContinuation;
  s.multiLevelContinuation = multiLevelContinuation;
  s.equiangulateBetweenLevels = equiangulate;
  s.mask = mask();
  return s;
}

DofMask RunConfig::mask() const {
  switch (problem) {
    case Problem::subproblemA: return {false, true};
    case Problem::subproblemB: return {true, false};
    default: return {true, true};
  }
}

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, Raw> raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineNo) + ": malformed section header", lineNo);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineNo) + ": expected key=value", lineNo);
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineNo) + ": empty key", lineNo);
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
    if (raw.count(key)) throw ConfigError("line " + std::to_string(lineNo) + ": duplicate key " + key, lineNo);
    raw[key] = {value, lineNo};
  }

  RunConfig cfg;
  bool anyMaterial = false, anyDimensional = false;
  int dimensionalLine = 0, materialLine = 0;
  bool haveS0 = false, haveTol = false;
  std::string anchoring;
  int anchoringLine = 0;
  double targetMeasure = 1.0;
  double materialS0 = 0.0;
  MaterialParams m = default_params(2);
  DimensionalParams d;

  using Setter = std::function<void(const std::string&, const std::string&, int)>;
  const std::map<std::string, Setter> setters = {
      {"run.dimension", [&](auto& k, auto& v, int l) { cfg.dimension = static_cast<int>(to_int(k, v, l)); }},
      {"run.problem",
       [&](auto& k, auto& v, int l) {
         if (v == "full") cfg.problem = Problem::full;
         else if (v == "subproblem-a" || v == "a") cfg.problem = Problem::subproblemA;
         else if (v == "subproblem-b" || v == "b") cfg.problem = Problem::subproblemB;
         else throw ConfigError("line " + std::to_string(l) + ": " + k + ": expected full, subproblem-a or subproblem-b", l);
       }},
      {"run.anchoring", [&](auto&, auto& v, int l) { anchoring = v; anchoringLine = l; }},
      {"run.target_measure", [&](auto& k, auto& v, int l) { targetMeasure = to_double(k, v, l); }},
      {"run.output", [&](auto&, auto& v, int) { cfg.outputDir = v; }},
      {"run.seed", [&](auto& k, auto& v, int l) { cfg.seed = static_cast<std::uint64_t>(to_int(k, v, l)); }},
      {"run.threads", [&](auto& k, auto& v, int l) { cfg.threads = static_cast<int>(to_int(k, v, l)); }},
      {"run.deterministic", [&](auto& k, auto& v, int l) { cfg.deterministic = to_bool(k, v, l); }},
      {"run.snapshots", [&](auto& k, auto& v, int l) { cfg.snapshots = to_bool(k, v, l); }},
      {"material.a", [&](auto& k, auto& v, int l) { m.a = to_double(k, v, l); }},
      {"material.b", [&](auto& k, auto& v, int l) { m.b = to_double(k, v, l); }},
      {"material.c", [&](auto& k, auto& v, int l) { m.c = to_double(k, v, l); }},
      {"material.tau", [&](auto& k, auto& v, int l) { m.tau = to_double(k, v, l); }},
      {"material.omega", [&](auto& k, auto& v, int l) { m.omega = to_double(k, v, l); }},
      {"material.S0",
       [&](auto& k, auto& v, int l) {
         materialS0 = to_double(k, v, l);
         haveS0 = true;
       }},
      {"dimensional.a", [&](auto& k, auto& v, int l) { d.a = to_double(k, v, l); }},
      {"dimensional.b", [&](auto& k, auto& v, int l) { d.b = to_double(k, v, l); }},
      {"dimensional.c", [&](auto& k, auto& v, int l) { d.c = to_double(k, v, l); }},
      {"dimensional.sigma", [&](auto& k, auto& v, int l) { d.sigma = to_double(k, v, l); }},
      {"dimensional.W", [&](auto& k, auto& v, int l) { d.W = to_double(k, v, l); }},
      {"dimensional.L1", [&](auto& k, auto& v, int l) { d.L1 = to_double(k, v, l); }},
      {"dimensional.xi", [&](auto& k, auto& v, int l) { d.xi = to_double(k, v, l); }},
      {"dimensional.a0", [&](auto& k, auto& v, int l) { d.a0 = to_double(k, v, l); }},
      {"dimensional.T", [&](auto& k, auto& v, int l) { d.T = to_double(k, v, l); }},
      {"dimensional.T0", [&](auto& k, auto& v, int l) { d.T0 = to_double(k, v, l); }},
      {"dimensional.use_temperature", [&](auto& k, auto& v, int l) { d.useTemperature = to_bool(k, v, l); }},
      {"solver.method",
       [&](auto& k, auto& v, int l) {
         if (v == "qn") cfg.solver.kind = SolverKind::qn;
         else if (v == "gd") cfg.solver.kind = SolverKind::gd;
         else throw ConfigError("line " + std::to_string(l) + ": " + k + ": expected qn or gd", l);
       }},
      {"solver.tol",
       [&](auto& k, auto& v, int l) {
         cfg.solver.conv.tol = to_double(k, v, l);
         haveTol = true;
       }},
      {"solver.max_iterations",
       [&](auto& k, auto& v, int l) { cfg.solver.conv.maxIterations = static_cast<int>(to_int(k, v, l)); }},
      {"solver.feasibility_tol", [&](auto& k, auto& v, int l) { cfg.solver.conv.feasibilityTol = to_double(k, v, l); }},
      {"qn.delta", [&](auto& k, auto& v, int l) { cfg.solver.qn.delta = to_double(k, v, l); }},
      {"qn.memory", [&](auto& k, auto& v, int l) { cfg.solver.qn.memory = static_cast<int>(to_int(k, v, l)); }},
      {"qn.eta", [&](auto& k, auto& v, int l) { cfg.solver.qn.eta = to_double(k, v, l); }},
      {"qn.shrink", [&](auto& k, auto& v, int l) { cfg.solver.qn.shrink = to_double(k, v, l); }},
      {"qn.rho", [&](auto& k, auto& v, int l) { cfg.solver.qn.rho = to_double(k, v, l); }},
      {"qn.curvature_eps", [&](auto& k, auto& v, int l) { cfg.solver.qn.curvatureEps = to_double(k, v, l); }},
      {"qn.scaling",
       [&](auto& k, auto& v, int l) {
         if (v == "fixed") cfg.solver.qn.scaling = InitialScaling::fixed;
         else if (v == "gamma") cfg.solver.qn.scaling = InitialScaling::gamma;
         else if (v == "block-gamma") cfg.solver.qn.scaling = InitialScaling::blockGamma;
         else throw ConfigError("line " + std::to_string(l) + ": " + k + ": expected fixed, gamma or block-gamma", l);
       }},
      {"gd.alpha0", [&](auto& k, auto& v, int l) { cfg.solver.gd.alpha0 = to_double(k, v, l); }},
      {"gd.beta0", [&](auto& k, auto& v, int l) { cfg.solver.gd.beta0 = to_double(k, v, l); }},
      {"gd.shrink", [&](auto& k, auto& v, int l) { cfg.solver.gd.shrink = to_double(k, v, l); }},
      {"gd.eta", [&](auto& k, auto& v, int l) { cfg.solver.gd.eta = to_double(k, v, l); }},
      {"gd.reprojection_tol", [&](auto& k, auto& v, int l) { cfg.solver.gd.reprojectionTol = to_double(k, v, l); }},
      {"gd.reprojection_max_steps",
       [&](auto& k, auto& v, int l) { cfg.solver.gd.reprojectionMaxSteps = static_cast<int>(to_int(k, v, l)); }},
      {"gd.equiangulate_every",
       [&](auto& k, auto& v, int l) { cfg.solver.gd.equiangulateEvery = static_cast<int>(to_int(k, v, l)); }},
      {"gd.field_steps", [&](auto& k, auto& v, int l) { cfg.solver.gd.fieldSteps = static_cast<int>(to_int(k, v, l)); }},
      {"gd.shape_steps", [&](auto& k, auto& v, int l) { cfg.solver.gd.shapeSteps = static_cast<int>(to_int(k, v, l)); }},
      {"ni.levels", [&](auto& k, auto& v, int l) { cfg.levels = static_cast<int>(to_int(k, v, l)); }},
      {"ni.omega_continuation", [&](auto& k, auto& v, int l) { cfg.omegaContinuation = to_list(k, v, l); }},
      {"ni.multilevel_continuation", [&](auto& k, auto& v, int l) { cfg.multiLevelContinuation = to_bool(k, v, l); }},
      {"ni.equiangulate", [&](auto& k, auto& v, int l) { cfg.equiangulate = to_bool(k, v, l); }},
      {"sweep.omegas", [&](auto& k, auto& v, int l) { cfg.sweepOmegas = to_list(k, v, l); }},
  };
  // bare keys of the minimal form (tau=10, levels=5) resolve to their home section
  const std::map<std::string, std::string> aliases = {
      {"tau", "material.tau"},   {"omega", "material.omega"}, {"levels", "ni.levels"},
      {"dimension", "run.dimension"}, {"tol", "solver.tol"},     {"solver", "solver.method"},
  };

  // dimension first: it selects the default anchoring and the 3D defaults
  for (const auto& [key, r] : raw) {
    if (key == "run.dimension" || key == "dimension") setters.at("run.dimension")(key, r.value, r.line);
  }
  if (cfg.dimension != 2 && cfg.dimension != 3) throw ConfigError("run.dimension must be 2 or 3");
  m = default_params(cfg.dimension);

  for (const auto& [key0, r] : raw) {
    std::string key = key0;
    if (auto a = aliases.find(key); a != aliases.end()) key = a->second;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("line " + std::to_string(r.line) + ": unknown key '" + key0 + "'", r.line);
    if (key.rfind("material.", 0) == 0) {
      anyMaterial = true;
      materialLine = materialLine ? materialLine : r.line;
    }
    if (key.rfind("dimensional.", 0) == 0) {
      anyDimensional = true;
      dimensionalLine = dimensionalLine ? dimensionalLine : r.line;
    }
    it->second(key, r.value, r.line);
  }
  // omega may still be given with a dimensional block: it is W / sigma there
  if (anyMaterial && anyDimensional)
    throw ConfigError("both dimensional (line " + std::to_string(dimensionalLine) + ") and nondimensional (line " +
                          std::to_string(materialLine) + ") parameter blocks present",
                      std::max(dimensionalLine, materialLine));

  if (anyDimensional) {
    cfg.dimensional = true;
    cfg.dimensionalParams = d;
    try {
      const MaterialParams nd = nondimensionalize(d, cfg.dimension);
      const Anchoring an = m.anchoring;
      m = nd;
      m.anchoring = an;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("dimensional: ") + e.what());
    }
  } else if (haveS0) {
    m.S0 = materialS0;
  } else {
    try {
      m.S0 = critical_order(m.a, m.b, m.c);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("material: ") + e.what());
    }
  }
  m.dimension = cfg.dimension;
  m.targetMeasure = targetMeasure;
  if (!anchoring.empty()) {
    if (anchoring == "tangential") m.anchoring = Anchoring::tangential;
    else if (anchoring == "normal") m.anchoring = Anchoring::normal;
    else throw ConfigError("line " + std::to_string(anchoringLine) + ": run.anchoring: expected tangential or normal",
                           anchoringLine);
  }
  cfg.material = m;
  if (!haveTol && cfg.dimension == 3) cfg.solver.conv.tol = 1e-4;

  // validation
  if (!(m.omega >= 0.0)) throw ConfigError("material.omega: omega must be ≥ 0");
  if (!(m.tau > 0.0)) throw ConfigError("material.tau: tau must be > 0");
  if (!(m.c > 0.0)) throw ConfigError("material.c: c must be > 0");
  if (!(m.S0 > 0.0)) throw ConfigError("material.S0: S0 must be > 0");
  if (!(targetMeasure > 0.0)) throw ConfigError("run.target_measure: must be > 0");
  if (cfg.dimension == 3 && m.anchoring == Anchoring::tangential)
    throw ConfigError("run.anchoring: tangential anchoring is only available in 2D");
  if (cfg.levels < 1) throw ConfigError("ni.levels: must be >= 1");
  if (cfg.threads < 1) throw ConfigError("run.threads: must be >= 1");
  if (!(cfg.solver.conv.tol > 0.0)) throw ConfigError("solver.tol: must be > 0");
  if (cfg.solver.conv.maxIterations < 0) throw ConfigError("solver.max_iterations: must be >= 0");
  const auto& qn = cfg.solver.qn;
  if (!(qn.delta > 0.0)) throw ConfigError("qn.delta: must be > 0");
  if (qn.memory < 1) throw ConfigError("qn.memory: must be >= 1");
  if (!(qn.rho > 0.0)) throw ConfigError("qn.rho: must be > 0");
  if (!(qn.eta > 0.0 && qn.eta < 1.0)) throw ConfigError("qn.eta: must lie in (0, 1)");
  if (!(qn.shrink > 0.0 && qn.shrink < 1.0)) throw ConfigError("qn.shrink: must lie in (0, 1)");
  const auto& gd = cfg.solver.gd;
  if (!(gd.eta > 0.0 && gd.eta < 1.0)) throw ConfigError("gd.eta: must lie in (0, 1)");
  if (!(gd.shrink > 0.0 && gd.shrink < 1.0)) throw ConfigError("gd.shrink: must lie in (0, 1)");
  if (!(gd.alpha0 > 0.0 && gd.beta0 > 0.0)) throw ConfigError("gd.alpha0/gd.beta0: must be > 0");
  if (!(gd.reprojectionTol > 0.0)) throw ConfigError("gd.reprojection_tol: must be > 0");
  validate_list(cfg.omegaContinuation, "ni.omega_continuation");
  validate_list(cfg.sweepOmegas, "sweep.omegas");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream os;
  const MaterialParams& m = cfg.material;
  os << "[run]\n"
     << "dimension=" << cfg.dimension << "\n"
     << "problem=" << to_string(cfg.problem) << "\n"
     << "anchoring=" << (m.anchoring == Anchoring::tangential ? "tangential" : "normal") << "\n"
     << "target_measure=" << fmt(m.targetMeasure) << "\n"
     << "output=" << cfg.outputDir << "\n"
     << "seed=" << cfg.seed << "\n"
     << "threads=" << cfg.threads << "\n"
     << "deterministic=" << (cfg.deterministic ? "true" : "false") << "\n"
     << "snapshots=" << (cfg.snapshots ? "true" : "false") << "\n";
  if (cfg.dimensional) {
    const DimensionalParams& d = cfg.dimensionalParams;
    os << "[dimensional]\n"
       << "a=" << fmt(d.a) << "\nb=" << fmt(d.b) << "\nc=" << fmt(d.c) << "\nsigma=" << fmt(d.sigma)
       << "\nW=" << fmt(d.W) << "\nL1=" << fmt(d.L1) << "\nxi=" << fmt(d.xi) << "\na0=" << fmt(d.a0)
       << "\nT=" << fmt(d.T) << "\nT0=" << fmt(d.T0)
       << "\nuse_temperature=" << (d.useTemperature ? "true" : "false") << "\n";
    os << "# resolved: a=" << fmt(m.a) << " b=" << fmt(m.b) << " c=" << fmt(m.c) << " tau=" << fmt(m.tau)
       << " omega=" << fmt(m.omega) << " S0=" << fmt(m.S0) << "\n";
  } else {
    os << "[material]\n"
       << "a=" << fmt(m.a) << "\nb=" << fmt(m.b) << "\nc=" << fmt(m.c) << "\ntau=" << fmt(m.tau)
       << "\nomega=" << fmt(m.omega) << "\nS0=" << fmt(m.S0) << "\n";
  }
  const LevelSolver& s = cfg.solver;
  os << "[solver]\n"
     << "method=" << (s.kind == SolverKind::qn ? "qn" : "gd") << "\n"
     << "tol=" << fmt(s.conv.tol) << "\n"
     << "max_iterations=" << s.conv.maxIterations << "\n"
     << "feasibility_tol=" << fmt(s.conv.feasibilityTol) << "\n"
     << "[qn]\n"
     << "delta=" << fmt(s.qn.delta) << "\nmemory=" << s.qn.memory << "\neta=" << fmt(s.qn.eta)
     << "\nshrink=" << fmt(s.qn.shrink) << "\nrho=" << fmt(s.qn.rho) << "\ncurvature_eps=" << fmt(s.qn.curvatureEps)
     << "\nscaling=" << scaling_name(s.qn.scaling) << "\n"
     << "[gd]\n"
     << "alpha0=" << fmt(s.gd.alpha0) << "\nbeta0=" << fmt(s.gd.beta0) << "\nshrink=" << fmt(s.gd.shrink)
     << "\neta=" << fmt(s.gd.eta) << "\nreprojection_tol=" << fmt(s.gd.reprojectionTol)
     << "\nreprojection_max_steps=" << s.gd.reprojectionMaxSteps << "\nequiangulate_every=" << s.gd.equiangulateEvery
     << "\nfield_steps=" << s.gd.fieldSteps << "\nshape_steps=" << s.gd.shapeSteps << "\n"
     << "[ni]\n"
     << "levels=" << cfg.levels << "\n"
     << "omega_continuation=" << fmt_list(cfg.omegaContinuation) << "\n"
     << "multilevel_continuation=" << (cfg.multiLevelContinuation ? "true" : "false") << "\n"
     << "equiangulate=" << (cfg.equiangulate ? "true" : "false") << "\n"
     << "[sweep]\n"
     << "omegas=" << fmt_list(cfg.sweepOmegas) << "\n";
  return os.str();
}

}  // namespace tactoid
