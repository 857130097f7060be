#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactoid/nested.hpp"

namespace tactoid {

enum class Problem { full, subproblemA, subproblemB };

struct RunConfig {
  int dimension = 2;
  bool dimensional = false;
  MaterialParams material = default_params(2);  // resolved nondimensional values
  DimensionalParams dimensionalParams;
  Problem problem = Problem::full;
  LevelSolver solver;
  int levels = 5;
  std::vector<double> omegaContinuation;
  bool multiLevelContinuation = false;
  bool equiangulate = true;
  std::vector<double> sweepOmegas;
  std::string outputDir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  bool deterministic = true;
  bool snapshots = true;

  NISchedule schedule() const;
  DofMask mask() const;
};

/// Parse or validation error; line is 0 for errors not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0) : std::runtime_error(what), line(line) {}
  int line;
};

/// Flat key=value text. '#' starts a comment; "[section]" sets a prefix for
/// the following bare keys; dotted keys are absolute.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Every key with its resolved value, in the accepted input format.
std::string to_text(const RunConfig& cfg);

std::string to_string(Problem p);

}  // namespace tactoid
