#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace overlap::synth {

inline constexpr std::size_t kFeatureDim = 64;
inline constexpr double kFeatureNoise = 0.1;
inline constexpr double kSignal = 0.7;
// Rotation per unit of OOD shift: a quarter turn at shift 10.
inline constexpr double kShiftAngle = 3.141592653589793 / 20.0;

/// Two modalities of 64 features each. Row-major n x 64 buffers.
struct Dataset {
  std::string family;
  std::uint64_t seed = 0;
  double entanglement = 0.0;
  double shift = 0.0;           // non-zero for OOD variants
  std::size_t n = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> labels;   // 0/1, equal to the interaction bit
  std::vector<std::uint8_t> latent;  // n x 3: a, b, a xor b

  std::size_t dim() const { return kFeatureDim; }
  std::uint8_t bit(std::size_t i, int which) const { return latent[i * 3 + static_cast<std::size_t>(which)]; }
};

/// Known families are "xor64" and "xor64/<k>" (k a basis variant index).
/// "graph" is reserved and not implemented; anything else raises
/// ParameterError.
bool known_family(const std::string& family);

/// Orthonormal encoding bases (columns) of a family: first for x, second for y.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> family_bases(const std::string& family);

/// Balanced latent bits a, b (each of the four (a, b) cells gets n/4 rows,
/// shuffled), c = a xor b, label = c. In the basis of its family, x holds
/// 0.7 (2a-1) on its first axis and 0.7 e (2c-1) on the second; y the same
/// with b. Every coordinate gets N(0, 0.1^2) noise.
Dataset generate(const std::string& family, std::size_t n, std::uint64_t seed, double entanglement);

/// Two families with the same latent semantics and independent bases.
std::pair<std::string, std::string> transfer_pair(std::uint64_t seed);

/// Rotates both signal axes of each modality towards noise axes by
/// kShiftAngle * shift radians, then scales by (1 + shift).
Dataset ood_variant(const Dataset& ds, double shift);

/// Rows [begin, end) as a new dataset.
Dataset slice(const Dataset& ds, const std::vector<std::size_t>& rows);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
/// Seeded shuffle, first `train_fraction` rows to train.
Split split_rows(std::size_t n, std::uint64_t seed, double train_fraction = 0.7);

std::string to_csv(const Dataset& ds);
/// stem.bin (x, y, labels as little-endian f64, then latent bytes) and
/// stem.json (header with family, seed, sizes and a checksum of the payload).
void save_binary(const Dataset& ds, const std::filesystem::path& stem);
Dataset load_binary(const std::filesystem::path& stem);
nlohmann::json header(const Dataset& ds);

}  // namespace overlap::synth
