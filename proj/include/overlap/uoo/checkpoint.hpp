#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "overlap/autodiff/tensor.hpp"

namespace overlap::uoo {

/// Writes `<stem>.bin` (all parameters as consecutive native 64-bit floats)
/// and `<stem>.json` (shapes plus `meta`).
void save_checkpoint(const std::filesystem::path& stem, const std::vector<ad::Tensor>& params,
                     const nlohmann::json& meta);

/// Restores parameter values in place; shapes must match the sidecar.
/// Returns the sidecar's `meta` object.
nlohmann::json load_checkpoint(const std::filesystem::path& stem, const std::vector<ad::Tensor>& params);

}  // namespace overlap::uoo
