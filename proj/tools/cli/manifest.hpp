#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace overlap::cli {

// Record of one invocation, written before any computation and rewritten when
// the command finishes with the files it actually produced.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::string started_at, finished_at;  // left empty in canonical mode
  std::string status = "running";
  std::vector<std::string> artifacts;   // relative to the manifest's directory
  nlohmann::json to_json() const;
};

std::string version_string();
std::string utc_now();

class ManifestWriter {
 public:
  ManifestWriter(std::filesystem::path path, RunManifest manifest, bool canonical);
  // Lists every regular file under `root` (except the manifest) and marks the status.
  void finish(const std::string& status, const std::filesystem::path& root);
  void finish(const std::string& status, std::vector<std::string> artifacts);
  RunManifest& manifest() { return m_; }

 private:
  void write() const;
  std::filesystem::path path_;
  RunManifest m_;
  bool canonical_;
};

}  // namespace overlap::cli
