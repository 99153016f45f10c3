#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fauio {

// Provenance record written next to every set of outputs. The run hash covers
// the config file bytes, the command name, and the resolved parameter list --
// but NOT the timestamp, so two runs with identical inputs carry the same
// hash and their data files are byte-identical.
struct RunManifest {
  std::string tool_version = "0.1.0";
  std::string command;      // validate | synth | simulate | report
  std::string config_path;
  std::string config_hash;  // fnv1a64 of the raw config bytes
  std::vector<std::pair<std::string, std::string>> params;  // fully resolved
  std::string run_hash;
  std::string timestamp;  // ISO-8601 UTC; informational only
};

RunManifest make_manifest(const std::string& command, const std::string& config_path,
                          const std::vector<std::pair<std::string, std::string>>& params);

std::string manifest_to_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace fauio
