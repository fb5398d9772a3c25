#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace overlap {

// 64-bit FNV-1a. Used for config identities and payload checksums, not security.
inline std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s) {
  return fnv1a({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
}

template <typename T>
std::uint64_t fnv1a_values(std::span<const T> values, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a({reinterpret_cast<const unsigned char*>(values.data()), values.size_bytes()}, h);
}

// splitmix64 step: derives independent stream seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace overlap
