#include "fauio/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fauio/matrixio.hpp"

namespace fauio {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("make_manifest: cannot read config '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string iso_utc_now() {
  const std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest make_manifest(const std::string& command, const std::string& config_path,
                          const std::vector<std::pair<std::string, std::string>>& params) {
  RunManifest m;
  m.command = command;
  m.config_path = config_path;
  m.params = params;
  const std::string cfg = read_file(config_path);
  m.config_hash = fnv1a64_hex(cfg);
  std::string canon = cfg;
  canon += "\n@command=" + command;
  for (const auto& [k, v] : params) canon += "\n@" + k + "=" + v;
  m.run_hash = fnv1a64_hex(canon);
  m.timestamp = iso_utc_now();
  return m;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["config_hash"] = m.config_hash;
  nlohmann::ordered_json pj = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.params) pj[k] = v;
  j["params"] = pj;
  j["run_hash"] = m.run_hash;
  j["timestamp"] = m.timestamp;
  return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_manifest: cannot open '" + path + "'");
  os << manifest_to_json(m);
  if (!os) throw std::runtime_error("write_manifest: write to '" + path + "' failed");
}

}  // namespace fauio
