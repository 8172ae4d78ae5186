#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdm/benchmarks.hpp"

namespace bdm {

/// Mesh document: patches, interfaces, and optionally a compiled weak
/// element stream (operators over the reduced DOFs).
struct MeshFile {
  MultiPatchModel model;
  std::optional<int> dual_level;
  std::optional<Mesh> weak;
  nlohmann::json info = nlohmann::json::object();
};

nlohmann::json mesh_to_json(const MeshFile& file);
/// Validates the document; errors carry InvalidKnotVector, InvalidWeights,
/// InvalidControlNet, or Io for structural problems.
MeshFile mesh_from_json(const nlohmann::json& j);

std::string write_mesh(const MeshFile& file);
MeshFile read_mesh(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// 17 significant digits.
std::string format_double(double x);

/// Header case,p,ratio,matched,n,level,h,dofs,l2_error,rate; a trailing
/// status column is added when some row failed.
std::string report_csv(const std::vector<ConvergenceReport>& reports);
std::string report_csv(const ConvergenceReport& report);

}  // namespace bdm
