#include "msift/manifest.hpp"

#include <json.hpp>

#include <cstdlib>
#include <ctime>

#include "msift/util.hpp"

namespace msift {

using nlohmann::json;

std::string config_digest(const json& params) { return to_hex(fnv1a64(params.dump())); }

std::string manifest_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* pinned = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long parsed = std::strtoll(pinned, &end, 10);
    if (end != pinned && *end == '\0') now = static_cast<std::time_t>(parsed);
  }
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

RunManifest make_manifest(const std::string& command, const json& params, std::uint64_t seed,
                          std::vector<std::string> input_paths,
                          std::vector<std::string> output_paths) {
  RunManifest m;
  m.command = command;
  m.config_digest = config_digest(params);
  m.seed = seed;
  m.input_paths = std::move(input_paths);
  m.output_paths = std::move(output_paths);
  m.tool_version = kToolVersion;
  m.timestamp = manifest_timestamp();
  return m;
}

std::string manifest_to_json(const RunManifest& manifest) {
  json j;
  j["command"] = manifest.command;
  j["config_digest"] = manifest.config_digest;
  j["seed"] = manifest.seed;
  j["input_paths"] = manifest.input_paths;
  j["output_paths"] = manifest.output_paths;
  j["tool_version"] = manifest.tool_version;
  j["timestamp"] = manifest.timestamp;
  return j.dump(2) + "\n";
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

void write_manifest(const RunManifest& manifest, const std::string& output_path) {
  atomic_write_file(manifest_path_for(output_path), manifest_to_json(manifest));
}

}  // namespace msift
