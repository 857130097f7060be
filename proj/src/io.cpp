#include "tactoid/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "tactoid/analysis.hpp"

namespace tactoid {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

std::vector<std::string> q_component_names(QMode mode) {
  if (mode == QMode::planar) return {"q_xx", "q_xy"};
  return {"q_xx", "q_xy", "q_xz", "q_yy", "q_yz"};
}

Snapshot make_snapshot(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params, int level,
                       int iteration) {
  Snapshot s;
  s.mesh = mesh;
  s.mode = field.mode();
  s.q = field.values();
  s.S.resize(field.size());
  s.director.resize(field.size());
  for (int v = 0; v < field.size(); ++v) {
    const Director d = eigen_decompose(field.at(v));
    s.S[v] = d.S;
    s.director[v] = d.n;
  }
  s.metadata = {{"level", level},
                {"iteration", iteration},
                {"dimension", params.dimension},
                {"a", params.a},
                {"b", params.b},
                {"c", params.c},
                {"tau", params.tau},
                {"omega", params.omega},
                {"S0", params.S0},
                {"target_measure", params.targetMeasure},
                {"anchoring_sign", params.anchoringSign()}};
  return s;
}

void write_snapshot(const Snapshot& snap, const std::string& path) {
  const SimplicialMesh& m = snap.mesh;
  const int n = m.vertexCount();
  const int nc = component_count(snap.mode);
  if (static_cast<int>(snap.S.size()) != n || static_cast<int>(snap.director.size()) != n ||
      static_cast<int>(snap.q.size()) != n * nc)
    throw IoError("write_snapshot: array lengths do not match the mesh (" + path + ")");
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n"
      << "tactoid snapshot\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  if (!snap.metadata.empty()) {
    out << "FIELD FieldData " << snap.metadata.size() << "\n";
    for (const auto& [k, v] : snap.metadata) out << k << " 1 1 double\n" << v << "\n";
  }
  out << "POINTS " << n << " double\n";
  for (const Vec3& p : m.vertices) out << p.x() << " " << p.y() << " " << p.z() << "\n";
  const int k = m.simplexSize();
  out << "CELLS " << m.elementCount() << " " << m.elementCount() * (k + 1) << "\n";
  for (const auto& el : m.elements) {
    out << k;
    for (int i = 0; i < k; ++i) out << " " << el[i];
    out << "\n";
  }
  out << "CELL_TYPES " << m.elementCount() << "\n";
  const int cellType = m.dimension == 2 ? 5 : 10;
  for (int e = 0; e < m.elementCount(); ++e) out << cellType << "\n";
  out << "POINT_DATA " << n << "\n"
      << "SCALARS S double 1\nLOOKUP_TABLE default\n";
  for (double s : snap.S) out << s << "\n";
  out << "VECTORS director double\n";
  for (const Vec3& d : snap.director) out << d.x() << " " << d.y() << " " << d.z() << "\n";
  const auto names = q_component_names(snap.mode);
  for (int c = 0; c < nc; ++c) {
    out << "SCALARS " << names[c] << " double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < n; ++v) out << snap.q[v * nc + c] << "\n";
  }
  finish(out, path);
}

const char* const kSummaryHeader =
    "level,vertices,iterations,energy,abs_c,lambda,mean_alpha_m,mean_alpha_q,final_alpha_m,final_alpha_q,"
    "wall_seconds,termination";

std::vector<SummaryRow> summary_rows(const std::vector<LevelStats>& stats) {
  std::vector<SummaryRow> rows;
  SummaryRow total;
  total.level = "total";
  total.termination = stats.empty() ? to_string(Termination::notRun) : to_string(stats.back().termination);
  for (const LevelStats& s : stats) {
    SummaryRow r;
    r.level = std::to_string(s.level);
    r.vertexCount = s.vertexCount;
    r.iterations = s.iterations;
    r.energy = s.energy;
    r.absC = s.absC;
    r.lambda = s.lambda;
    r.meanAlphaM = s.meanAlphaM;
    r.meanAlphaQ = s.meanAlphaQ;
    r.finalAlphaM = s.finalAlphaM;
    r.finalAlphaQ = s.finalAlphaQ;
    r.wallSeconds = s.wallSeconds;
    r.termination = to_string(s.termination);
    rows.push_back(r);
    total.iterations += s.iterations;
    total.wallSeconds += s.wallSeconds;
    total.vertexCount = s.vertexCount;
    total.energy = s.energy;
    total.absC = s.absC;
    total.lambda = s.lambda;
    total.finalAlphaM = s.finalAlphaM;
    total.finalAlphaQ = s.finalAlphaQ;
    total.meanAlphaM += s.meanAlphaM * s.iterations;
    total.meanAlphaQ += s.meanAlphaQ * s.iterations;
  }
  if (total.iterations > 0) {
    total.meanAlphaM /= total.iterations;
    total.meanAlphaQ /= total.iterations;
  }
  rows.push_back(total);
  return rows;
}

void write_summary(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << kSummaryHeader << "\n";
  for (const SummaryRow& r : rows)
    out << r.level << "," << r.vertexCount << "," << r.iterations << "," << r.energy << "," << r.absC << ","
        << r.lambda << "," << r.meanAlphaM << "," << r.meanAlphaQ << "," << r.finalAlphaM << "," << r.finalAlphaQ
        << "," << r.wallSeconds << "," << r.termination << "\n";
  finish(out, path);
}

void write_failure_marker(const std::string& dir, const std::string& kind, const std::string& message,
                          const std::map<std::string, std::string>& extra) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = (std::filesystem::path(dir) / "failure.marker").string();
  std::ofstream out = open_out(path);
  out << "status=failed\n"
      << "kind=" << one_line(kind) << "\n"
      << "message=" << one_line(message) << "\n";
  for (const auto& [k, v] : extra) out << one_line(k) << "=" << one_line(v) << "\n";
  finish(out, path);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace tactoid
