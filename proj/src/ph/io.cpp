#include "overlap/ph/io.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "overlap/error.hpp"

namespace overlap::ph {

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t == "inf" || t == "+inf" || t == "Inf" || t == "infinity") return kInfinity;
  if (t == "-inf") return -kInfinity;
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ParameterError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

std::string to_csv(const PersistenceDiagram& pd) {
  std::ostringstream os;
  os << "dim,birth,death\n";
  for (const auto& f : pd.features) os << f.dim << ',' << format_double(f.birth) << ',' << format_double(f.death) << '\n';
  return os.str();
}

PersistenceDiagram diagram_from_csv(std::istream& in) {
  PersistenceDiagram pd;
  pd.max_dim = 0;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (first) {
      first = false;
      if (line.rfind("dim", 0) == 0) continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw ParameterError("diagram CSV rows need dim,birth,death");
    Feature f;
    f.dim = static_cast<int>(parse_double(cells[0]));
    f.birth = parse_double(cells[1]);
    f.death = parse_double(cells[2]);
    if (f.death < f.birth) throw ParameterError("diagram feature dies before it is born");
    pd.max_dim = std::max(pd.max_dim, f.dim);
    pd.features.push_back(f);
  }
  return pd;
}

nlohmann::json to_json(const PersistenceDiagram& pd) {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : pd.features) {
    nlohmann::json row{{"dim", f.dim}, {"birth", f.birth}};
    if (f.essential()) {
      row["death"] = "inf";
    } else {
      row["death"] = f.death;
    }
    feats.push_back(std::move(row));
  }
  return nlohmann::json{{"features", std::move(feats)}};
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
  PersistenceDiagram pd;
  pd.max_dim = 0;
  for (const auto& row : j.at("features")) {
    Feature f;
    f.dim = row.at("dim").get<int>();
    f.birth = row.at("birth").get<double>();
    const auto& d = row.at("death");
    f.death = d.is_string() ? parse_double(d.get<std::string>()) : d.get<double>();
    pd.max_dim = std::max(pd.max_dim, f.dim);
    pd.features.push_back(f);
  }
  return pd;
}

PointCloud cloud_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    std::vector<double> row;
    try {
      for (const auto& c : cells) row.push_back(parse_double(c));
    } catch (const ParameterError&) {
      if (rows.empty()) continue;  // header
      throw;
    }
    rows.push_back(std::move(row));
  }
  return PointCloud::from_rows(rows);
}

}  // namespace overlap::ph
