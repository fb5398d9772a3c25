#include "manifest.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "overlap/error.hpp"

#ifndef OVERLAP_VERSION
#define OVERLAP_VERSION "v0.1.0"
#endif

namespace overlap::cli {

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j{{"command", command}, {"arguments", arguments}, {"config_hash", config_hash},
                   {"seed", seed},       {"version", version},     {"status", status},
                   {"artifacts", artifacts}};
  if (!started_at.empty()) j["started_at"] = started_at;
  if (!finished_at.empty()) j["finished_at"] = finished_at;
  return j;
}

std::string version_string() { return OVERLAP_VERSION; }

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ManifestWriter::ManifestWriter(std::filesystem::path path, RunManifest manifest, bool canonical)
    : path_(std::move(path)), m_(std::move(manifest)), canonical_(canonical) {
  m_.version = version_string();
  if (!canonical_) m_.started_at = utc_now();
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  write();
}

void ManifestWriter::finish(const std::string& status, const std::filesystem::path& root) {
  std::vector<std::string> files;
  if (std::filesystem::exists(root))
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
      if (!e.is_regular_file() || e.path() == path_) continue;
      files.push_back(std::filesystem::relative(e.path(), path_.parent_path()).generic_string());
    }
  finish(status, std::move(files));
}

void ManifestWriter::finish(const std::string& status, std::vector<std::string> artifacts) {
  std::sort(artifacts.begin(), artifacts.end());
  m_.artifacts = std::move(artifacts);
  m_.status = status;
  if (!canonical_) m_.finished_at = utc_now();
  write();
}

void ManifestWriter::write() const {
  std::ofstream out(path_);
  out << m_.to_json().dump(2) << '\n';
  if (!out) throw ParameterError("could not write " + path_.string());
}

}  // namespace overlap::cli
