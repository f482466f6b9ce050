#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>
#include <vector>

namespace tensionlab {

// FNV-1a, used for cache keys and profile checksums.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::vector<double>& values) {
  std::uint64_t h = 14695981039346656037ull;
  for (double v : values) {
    unsigned char buf[sizeof(double)];
    std::memcpy(buf, &v, sizeof(double));
    for (unsigned char c : buf) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace tensionlab
