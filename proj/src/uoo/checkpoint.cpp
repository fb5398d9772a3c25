#include "overlap/uoo/checkpoint.hpp"

#include <fstream>

#include "overlap/error.hpp"

namespace overlap::uoo {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& stem, const std::vector<ad::Tensor>& params,
                     const nlohmann::json& meta) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& p : params) {
    const auto d = p.data();
    bin.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
    shapes.push_back(p.shape());
  }
  if (!bin) throw StateError("could not write checkpoint " + with_suffix(stem, ".bin").string());
  std::ofstream side(with_suffix(stem, ".json"));
  side << nlohmann::json{{"format", "f64-le"}, {"shapes", shapes}, {"meta", meta}}.dump(2) << '\n';
}

nlohmann::json load_checkpoint(const std::filesystem::path& stem, const std::vector<ad::Tensor>& params) {
  std::ifstream side(with_suffix(stem, ".json"));
  if (!side) throw StateError("missing checkpoint sidecar " + with_suffix(stem, ".json").string());
  const auto j = nlohmann::json::parse(side);
  const auto& shapes = j.at("shapes");
  if (shapes.size() != params.size()) throw DimensionError("checkpoint holds a different number of tensors");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (shapes[i].get<ad::Shape>() != params[i].shape()) throw DimensionError("checkpoint tensor " + std::to_string(i) + " has another shape");
  }
  std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  for (auto p : params) {
    auto d = p.mutable_data();
    bin.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (!bin) throw StateError("checkpoint data truncated");
  }
  return j.at("meta");
}

}  // namespace overlap::uoo
