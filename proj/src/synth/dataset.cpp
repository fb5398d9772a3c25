#include "overlap/synth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "overlap/error.hpp"
#include "overlap/hash.hpp"

namespace overlap::synth {

namespace {

Eigen::MatrixXd random_orthonormal(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign fix so the draw is Haar and does not depend on QR conventions.
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

void encode(const Eigen::MatrixXd& basis, double own, double shared, std::mt19937_64& rng, double* out) {
  std::normal_distribution<double> noise(0.0, kFeatureNoise);
  Eigen::VectorXd z(static_cast<Eigen::Index>(kFeatureDim));
  for (auto& v : z) v = noise(rng);
  z(0) += own;
  z(1) += shared;
  const Eigen::VectorXd f = basis * z;
  std::copy(f.data(), f.data() + f.size(), out);
}

// Rotation by theta in the planes of basis columns (0, 2) and (1, 3): both
// signal axes turn towards noise axes. Then every row is scaled.
void rotate_rows(std::vector<double>& rows, const Eigen::MatrixXd& basis, double theta, double factor) {
  const double c = std::cos(theta), s = std::sin(theta);
  const std::size_t d = kFeatureDim;
  for (std::size_t i = 0; i < rows.size() / d; ++i) {
    Eigen::Map<Eigen::VectorXd> r(rows.data() + i * d, static_cast<Eigen::Index>(d));
    for (Eigen::Index plane = 0; plane < 2; ++plane) {
      const Eigen::VectorXd u = basis.col(plane), w = basis.col(plane + 2);
      const double pu = u.dot(r), pw = w.dot(r);
      r += (c * pu - s * pw - pu) * u + (s * pu + c * pw - pw) * w;
    }
    r *= factor;
  }
}

template <typename T>
void write_raw(std::ostream& os, const std::vector<T>& v) {
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_raw(std::istream& is, std::vector<T>& v) {
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
  if (!is) throw ParameterError("dataset payload is truncated");
}

std::uint64_t payload_checksum(const Dataset& ds) {
  auto h = fnv1a_values<double>(ds.x);
  h = fnv1a_values<double>(ds.y, h);
  h = fnv1a_values<double>(ds.labels, h);
  return fnv1a_values<std::uint8_t>(ds.latent, h);
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

bool known_family(const std::string& family) {
  if (family == "xor64") return true;
  if (family.rfind("xor64/", 0) != 0 || family.size() == 6) return false;
  return std::all_of(family.begin() + 6, family.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> family_bases(const std::string& family) {
  if (family == "graph") throw ParameterError("family 'graph' is reserved but not implemented");
  if (!known_family(family)) throw ParameterError("unknown family '" + family + "'");
  const std::uint64_t key = fnv1a(family);
  return {random_orthonormal(kFeatureDim, mix_seed(key, 0)), random_orthonormal(kFeatureDim, mix_seed(key, 1))};
}

Dataset generate(const std::string& family, std::size_t n, std::uint64_t seed, double entanglement) {
  if (n < 1) throw ParameterError("dataset needs n >= 1");
  if (!(entanglement >= 0.0 && entanglement <= 1.0)) throw ParameterError("entanglement must lie in [0, 1]");
  const auto [bx, by] = family_bases(family);
  Dataset ds;
  ds.family = family;
  ds.seed = seed;
  ds.entanglement = entanglement;
  ds.n = n;
  ds.x.resize(n * kFeatureDim);
  ds.y.resize(n * kFeatureDim);
  ds.labels.resize(n);
  ds.latent.resize(n * 3);

  std::mt19937_64 rng(mix_seed(seed, 2));
  std::vector<std::uint8_t> cell(n);
  for (std::size_t i = 0; i < n; ++i) cell[i] = static_cast<std::uint8_t>(i % 4);
  std::shuffle(cell.begin(), cell.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = cell[i] & 1, b = (cell[i] >> 1) & 1, c = a ^ b;
    ds.latent[i * 3] = static_cast<std::uint8_t>(a);
    ds.latent[i * 3 + 1] = static_cast<std::uint8_t>(b);
    ds.latent[i * 3 + 2] = static_cast<std::uint8_t>(c);
    ds.labels[i] = c;
    const double shared = kSignal * entanglement * (2.0 * c - 1.0);
    encode(bx, kSignal * (2.0 * a - 1.0), shared, rng, ds.x.data() + i * kFeatureDim);
    encode(by, kSignal * (2.0 * b - 1.0), shared, rng, ds.y.data() + i * kFeatureDim);
  }
  return ds;
}

std::pair<std::string, std::string> transfer_pair(std::uint64_t seed) {
  const std::uint64_t k = mix_seed(seed, 3) % 1000000;
  return {"xor64/" + std::to_string(2 * k + 1), "xor64/" + std::to_string(2 * k + 2)};
}

Dataset ood_variant(const Dataset& ds, double shift) {
  if (!(shift >= 0.0)) throw ParameterError("shift must be non-negative");
  Dataset out = ds;
  out.shift = ds.shift + shift;
  if (shift == 0.0) return out;
  const auto [bx, by] = family_bases(ds.family);
  rotate_rows(out.x, bx, kShiftAngle * shift, 1.0 + shift);
  rotate_rows(out.y, by, kShiftAngle * shift, 1.0 + shift);
  return out;
}

Dataset slice(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.family = ds.family;
  out.seed = ds.seed;
  out.entanglement = ds.entanglement;
  out.shift = ds.shift;
  out.n = rows.size();
  const std::size_t d = kFeatureDim;
  for (std::size_t r : rows) {
    if (r >= ds.n) throw DimensionError("slice row out of range");
    out.x.insert(out.x.end(), ds.x.begin() + static_cast<std::ptrdiff_t>(r * d), ds.x.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
    out.y.insert(out.y.end(), ds.y.begin() + static_cast<std::ptrdiff_t>(r * d), ds.y.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
    out.labels.push_back(ds.labels[r]);
    for (int k = 0; k < 3; ++k) out.latent.push_back(ds.latent[r * 3 + static_cast<std::size_t>(k)]);
  }
  return out;
}

Split split_rows(std::size_t n, std::uint64_t seed, double train_fraction) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(mix_seed(seed, 4));
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto cut = static_cast<std::size_t>(std::round(train_fraction * static_cast<double>(n)));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cut));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(cut), idx.end());
  return s;
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t d = kFeatureDim;
  for (std::size_t k = 0; k < d; ++k) os << 'x' << k << ',';
  for (std::size_t k = 0; k < d; ++k) os << 'y' << k << ',';
  os << "label\n";
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t k = 0; k < d; ++k) os << ds.x[i * d + k] << ',';
    for (std::size_t k = 0; k < d; ++k) os << ds.y[i * d + k] << ',';
    os << ds.labels[i] << '\n';
  }
  return os.str();
}

nlohmann::json header(const Dataset& ds) {
  return {{"format", "overlap-dataset-v1"},
          {"family", ds.family},
          {"seed", ds.seed},
          {"entanglement", ds.entanglement},
          {"shift", ds.shift},
          {"n", ds.n},
          {"dim", kFeatureDim},
          {"layout", {"x:f64[n,dim]", "y:f64[n,dim]", "labels:f64[n]", "latent:u8[n,3]"}},
          {"checksum", hex(payload_checksum(ds))}};
}

void save_binary(const Dataset& ds, const std::filesystem::path& stem) {
  std::ofstream bin(stem.string() + ".bin", std::ios::binary);
  write_raw(bin, ds.x);
  write_raw(bin, ds.y);
  write_raw(bin, ds.labels);
  write_raw(bin, ds.latent);
  if (!bin) throw ParameterError("could not write " + stem.string() + ".bin");
  std::ofstream js(stem.string() + ".json");
  js << header(ds).dump(2) << '\n';
}

Dataset load_binary(const std::filesystem::path& stem) {
  std::ifstream js(stem.string() + ".json");
  if (!js) throw ParameterError("missing " + stem.string() + ".json");
  const auto h = nlohmann::json::parse(js);
  if (h.at("format") != "overlap-dataset-v1") throw ParameterError("unknown dataset format");
  if (h.at("dim").get<std::size_t>() != kFeatureDim) throw DimensionError("dataset dimension mismatch");
  Dataset ds;
  ds.family = h.at("family").get<std::string>();
  ds.seed = h.at("seed").get<std::uint64_t>();
  ds.entanglement = h.at("entanglement").get<double>();
  ds.shift = h.at("shift").get<double>();
  ds.n = h.at("n").get<std::size_t>();
  ds.x.resize(ds.n * kFeatureDim);
  ds.y.resize(ds.n * kFeatureDim);
  ds.labels.resize(ds.n);
  ds.latent.resize(ds.n * 3);
  std::ifstream bin(stem.string() + ".bin", std::ios::binary);
  read_raw(bin, ds.x);
  read_raw(bin, ds.y);
  read_raw(bin, ds.labels);
  read_raw(bin, ds.latent);
  if (hex(payload_checksum(ds)) != h.at("checksum").get<std::string>())
    throw ParameterError("dataset checksum mismatch");
  return ds;
}

}  // namespace overlap::synth
