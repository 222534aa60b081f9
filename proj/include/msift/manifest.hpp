#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace msift {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance sidecar written next to every output file. The digest covers
/// every parameter that affects output bytes; the timestamp does not enter
/// it. Setting SOURCE_DATE_EPOCH pins the timestamp for reproducible runs.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<std::string> input_paths;
  std::vector<std::string> output_paths;
  std::string tool_version;
  std::string timestamp;
};

/// Hex digest of the canonical serialization of an output-affecting
/// parameter set.
std::string config_digest(const nlohmann::json& params);

std::string manifest_timestamp();

RunManifest make_manifest(const std::string& command, const nlohmann::json& params,
                          std::uint64_t seed, std::vector<std::string> input_paths,
                          std::vector<std::string> output_paths);

std::string manifest_to_json(const RunManifest& manifest);

/// Writes `<output_path>.manifest.json` atomically.
void write_manifest(const RunManifest& manifest, const std::string& output_path);

std::string manifest_path_for(const std::string& output_path);

}  // namespace msift
