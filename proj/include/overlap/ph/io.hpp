#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "overlap/ph/persistence.hpp"

namespace overlap::ph {

// CSV with header "dim,birth,death"; infinite deaths are written as "inf".
std::string to_csv(const PersistenceDiagram& pd);
PersistenceDiagram diagram_from_csv(std::istream& in);

// {"features": [{"dim": 0, "birth": 0.0, "death": "inf"}, ...]}
nlohmann::json to_json(const PersistenceDiagram& pd);
PersistenceDiagram diagram_from_json(const nlohmann::json& j);

// Point clouds as headerless or headed CSV of numbers, one point per row.
PointCloud cloud_from_csv(std::istream& in);

}  // namespace overlap::ph
