#include "vharv/manifest.hpp"

#include <ctime>
#include <fstream>

#include <json.hpp>

#include "vharv/config.hpp"
#include "vharv/errors.hpp"

namespace vharv {

std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["timestamp"] = iso8601_now();
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["seed"] = m.seed;
  j["out_dir"] = m.out_dir;
  j["resolved_params"] = nlohmann::json::parse(plant_params_to_json(m.resolved_params));
  if (!m.extra_json.empty()) j["options"] = nlohmann::json::parse(m.extra_json);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace vharv
