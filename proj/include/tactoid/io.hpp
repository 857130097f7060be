#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactoid/energy.hpp"
#include "tactoid/mesh.hpp"
#include "tactoid/nested.hpp"
#include "tactoid/qfield.hpp"

namespace tactoid {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  SimplicialMesh mesh;
  QMode mode = QMode::planar;
  std::vector<double> S;
  std::vector<Vec3> director;
  std::vector<double> q;  // component_count(mode) values per vertex
  /// Written as dataset field data; values must be numeric.
  std::map<std::string, double> metadata;
};

Snapshot make_snapshot(const SimplicialMesh& mesh, const NodalQField& field, const MaterialParams& params, int level,
                       int iteration);

/// Names of the per-component Q arrays for the given mode.
std::vector<std::string> q_component_names(QMode mode);

/// Legacy VTK ASCII unstructured grid, 17 significant digits.
void write_snapshot(const Snapshot& snap, const std::string& path);

struct SummaryRow {
  std::string level;  // 1-based level number, or "total"
  int vertexCount = 0;
  int iterations = 0;
  double energy = 0.0;
  double absC = 0.0;
  double lambda = 0.0;
  double meanAlphaM = 0.0;
  double meanAlphaQ = 0.0;
  double finalAlphaM = 0.0;
  double finalAlphaQ = 0.0;
  double wallSeconds = 0.0;
  std::string termination;
};

/// One row per level plus a footer: finest vertex count and energy, summed
/// iterations and wall time.
std::vector<SummaryRow> summary_rows(const std::vector<LevelStats>& stats);

extern const char* const kSummaryHeader;
void write_summary(const std::vector<SummaryRow>& rows, const std::string& path);

/// key=value lines: status=failed, kind, message and any extra entries.
void write_failure_marker(const std::string& dir, const std::string& kind, const std::string& message,
                          const std::map<std::string, std::string>& extra = {});

/// Creates the directory (and parents); throws IoError on failure.
void ensure_directory(const std::string& dir);

}  // namespace tactoid
