#pragma once

#include <cstdint>
#include <string>

#include "vharv/params.hpp"

namespace vharv {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written alongside every output set; re-running the
/// recorded command with the recorded seed reproduces the outputs bit-exactly.
struct RunManifest {
  std::string command;
  std::string config_path;
  PlantParams resolved_params;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string extra_json;  ///< command-specific fields, already-serialized object
};

void write_manifest(const std::string& path, const RunManifest& m);

/// Current UTC time, ISO-8601.
std::string iso8601_now();

}  // namespace vharv
