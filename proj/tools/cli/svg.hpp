#pragma once

#include <optional>
#include <string>
#include <vector>

#include "overlap/harness/protocols.hpp"
#include "overlap/ph/persistence.hpp"

namespace overlap::cli {

// Static SVG figures. Each returns a complete document.
std::string histogram_svg(const harness::Histogram& h, std::optional<double> marker, const std::string& title,
                          const std::string& xlabel);
std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, std::optional<double> marker,
                        const std::string& title, const std::string& xlabel, const std::string& ylabel);
// Birth/death scatter with the diagonal; essential points drawn on a top rail.
std::string diagram_svg(const ph::PersistenceDiagram& pd, const std::string& title);

}  // namespace overlap::cli
