#pragma once

#include <string>

#include "ccilc/ilc_engine.hpp"

namespace ccilc {

// Declarative run description loaded from a JSON scenario file. See the
// README for the schema; every matrix is a nested array, systems carry an
// `lti` flag, contours are inline CSV paths or parametric shapes.
struct Scenario {
  std::string name;
  IlcRunConfig config;
  std::string output_dir = "out";
  bool dump_matrices = false;
};

Scenario load_scenario(const std::string& path);

}  // namespace ccilc
