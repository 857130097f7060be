#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tactoid/analysis.hpp"
#include "tactoid/experiments.hpp"

using namespace tactoid;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "tactoid_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> read_marker(const std::string& dir) {
  std::map<std::string, std::string> kv;
  std::ifstream in(fs::path(dir) / "failure.marker");
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

// Minimal legacy-VTK reader: point count and the named point arrays.
struct ParsedVtk {
  int points = 0;
  std::map<std::string, std::vector<double>> scalars;
  std::vector<double> director;
  std::vector<int> cellTypes;
};

ParsedVtk parse_vtk(const std::string& path) {
  std::ifstream in(path);
  ParsedVtk out;
  std::string tok;
  while (in >> tok) {
    if (tok == "POINTS") {
      std::string type;
      in >> out.points >> type;
      for (int i = 0; i < 3 * out.points; ++i) in >> tok;
    } else if (tok == "CELL_TYPES") {
      int n;
      in >> n;
      out.cellTypes.resize(n);
      for (int& t : out.cellTypes) in >> t;
    } else if (tok == "SCALARS") {
      std::string name, type, lt, def;
      int comps;
      in >> name >> type >> comps >> lt >> def;
      auto& v = out.scalars[name];
      for (int i = 0; i < out.points; ++i) {
        in >> tok;
        v.push_back(std::strtod(tok.c_str(), nullptr));
      }
    } else if (tok == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      for (int i = 0; i < 3 * out.points; ++i) {
        in >> tok;
        out.director.push_back(std::strtod(tok.c_str(), nullptr));
      }
    }
  }
  return out;
}

RunConfig small_config(const std::string& name) {
  RunConfig cfg;
  cfg.levels = 2;
  cfg.material.omega = 0.2;
  cfg.outputDir = scratch(name);
  return cfg;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(TACTOID_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("snapshot round trip through an independent reader") {
  SimplicialMesh mesh = refine_uniform(build_coarse_disc(M_PI)).first;
  const MaterialParams p = default_params(2);
  NodalQField f(QMode::planar, mesh.vertexCount());
  for (int v = 0; v < mesh.vertexCount(); ++v)
    f.set(v, from_director(p.S0, Vec3(std::cos(0.3 * v), std::sin(0.3 * v), 0.0), QMode::planar));
  const Snapshot s = make_snapshot(mesh, f, p, 2, 17);
  const std::string path = scratch("vtk") + "/s.vtk";
  write_snapshot(s, path);
  const ParsedVtk r = parse_vtk(path);
  CHECK(r.points == mesh.vertexCount());
  CHECK(r.cellTypes.size() == static_cast<std::size_t>(mesh.elementCount()));
  CHECK(std::all_of(r.cellTypes.begin(), r.cellTypes.end(), [](int t) { return t == 5; }));
  CHECK(r.scalars.at("S") == s.S);
  CHECK(r.scalars.count("q_xx") == 1);
  CHECK(r.scalars.count("q_xy") == 1);
  for (int v = 0; v < r.points; ++v) {
    const double len = std::sqrt(r.director[3 * v] * r.director[3 * v] + r.director[3 * v + 1] * r.director[3 * v + 1] +
                                 r.director[3 * v + 2] * r.director[3 * v + 2]);
    CHECK(std::abs(len - 1.0) <= 1e-9);
  }
  const std::string text = read_file(path);
  CHECK(text.find("FIELD FieldData") != std::string::npos);
  CHECK(text.find("omega 1 1 double") != std::string::npos);
}

TEST_CASE("3D snapshots use tetrahedra and five components") {
  const SimplicialMesh ball = build_ball(1.0);
  const MaterialParams p = default_params(3);
  const NodalQField f = NodalQField::uniform(from_director(p.S0, Vec3::UnitZ(), QMode::full), ball.vertexCount());
  const std::string path = scratch("vtk3") + "/b.vtk";
  write_snapshot(make_snapshot(ball, f, p, 1, 0), path);
  const ParsedVtk r = parse_vtk(path);
  CHECK(std::all_of(r.cellTypes.begin(), r.cellTypes.end(), [](int t) { return t == 10; }));
  CHECK(r.scalars.size() == 6);
}

TEST_CASE("writing into a missing directory is an i/o error") {
  const SimplicialMesh mesh = build_coarse_disc(1.0);
  const MaterialParams p = default_params(2);
  const NodalQField f = NodalQField::uniform(from_director(p.S0, Vec3::UnitX(), QMode::planar), mesh.vertexCount());
  CHECK_THROWS_AS(write_snapshot(make_snapshot(mesh, f, p, 1, 0), "/nonexistent/dir/x.vtk"), IoError);
}

TEST_CASE("run writes per-level outputs and a summary with a total row") {
  const RunConfig cfg = small_config("run");
  const RunOutput out = run_full(cfg);
  CHECK(out.summary.size() == static_cast<std::size_t>(cfg.levels + 1));
  CHECK(out.summary.back().level == "total");
  CHECK(fs::exists(cfg.outputDir + "/level_1.vtk"));
  CHECK(fs::exists(cfg.outputDir + "/level_2.vtk"));
  CHECK(fs::exists(cfg.outputDir + "/final.vtk"));
  CHECK(fs::exists(cfg.outputDir + "/config.txt"));
  CHECK(!fs::exists(cfg.outputDir + "/failure.marker"));
  const std::string csv = read_file(cfg.outputDir + "/summary.csv");
  CHECK(csv.rfind(std::string(kSummaryHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == cfg.levels + 2);
  CHECK(parse_config(cfg.outputDir + "/config.txt").material.omega == 0.2);
}

TEST_CASE("repeated runs are bit-identical, for any thread count") {
  RunConfig a = small_config("rep_a");
  RunConfig b = small_config("rep_b");
  b.threads = 3;
  const RunOutput ra = run_full(a);
  const RunOutput rb = run_full(b);
  const RunOutput rc = run_full(a);
  CHECK(ra.ni.field.values() == rb.ni.field.values());
  CHECK(ra.ni.field.values() == rc.ni.field.values());
  CHECK(ra.ni.mesh.vertices == rb.ni.mesh.vertices);
  CHECK(ra.ni.stats.back().energy == rb.ni.stats.back().energy);
}

TEST_CASE("gradient check passes in both dimensions") {
  RunConfig cfg = small_config("grad");
  CHECK(check_gradients(cfg).pass);
  cfg.material.omega = 0.0;
  const GradientReport zero = check_gradients(cfg);
  CHECK(zero.pass);
  CHECK(zero.anchoringBlockZero);
  RunConfig c3 = parse_config_text("dimension = 3\nomega = 0.04\n");
  CHECK(check_gradients(c3).pass);
}

TEST_CASE("sweep records every omega") {
  RunConfig cfg = small_config("sweep");
  cfg.snapshots = false;
  const SweepResult s = sweep_omega(cfg, {0.05, 0.1});
  REQUIRE(s.rows.size() == 2);
  CHECK(!s.rows[0].failed);
  CHECK(!s.rows[1].failed);
  const std::string csv = read_file(cfg.outputDir + "/sweep.csv");
  CHECK(csv.rfind(kSweepHeader, 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("command line exit codes and failure markers") {
  const std::string dir = scratch("cli");
  {
    std::ofstream cfg(dir + "/bad.cfg");
    cfg << "material.omega = -0.1\n";
  }
  CHECK(run_cli("run --config " + dir + "/bad.cfg --out " + dir + "/bad") == 2);
  auto marker = read_marker(dir + "/bad");
  CHECK(marker["status"] == "failed");
  CHECK(marker["kind"] == "config");
  CHECK(marker["message"].find("omega must be ≥ 0") != std::string::npos);

  {
    std::ofstream cfg(dir + "/unknown.cfg");
    cfg << "tau = 3\nbogus = 1\n";
  }
  CHECK(run_cli("suba --config " + dir + "/unknown.cfg --out " + dir + "/unknown") == 2);
  CHECK(read_marker(dir + "/unknown")["line"] == "2");

  CHECK(run_cli("run --config " + dir + "/missing.cfg --out " + dir + "/missing") == 2);
  CHECK(fs::exists(dir + "/missing/failure.marker"));

  {
    std::ofstream cfg(dir + "/ok.cfg");
    cfg << "levels = 1\nomega = 0.2\n";
  }
  CHECK(run_cli("suba --config " + dir + "/ok.cfg --out " + dir + "/ok") == 0);
  CHECK(fs::exists(dir + "/ok/final.vtk"));
  CHECK(!fs::exists(dir + "/ok/failure.marker"));
  CHECK(run_cli("checkgrad --config " + dir + "/ok.cfg --out " + dir + "/grad") == 0);

  {
    std::ofstream cfg(dir + "/stuck.cfg");
    // every trial step overflows, so the first line search fails
    cfg << "levels = 1\nsolver = gd\ngd.alpha0 = 1e300\ngd.beta0 = 1e300\n";
  }
  CHECK(run_cli("run --config " + dir + "/stuck.cfg --out " + dir + "/stuck") == 1);
  CHECK(read_marker(dir + "/stuck")["kind"] == "solver");
  CHECK(fs::exists(dir + "/stuck/summary.csv"));
}
