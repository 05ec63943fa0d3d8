#pragma once

#include <cstdint>
#include <random>

namespace inclab {

/// splitmix64 step; used to derive independent sub-seeds so that parallel
/// and serial runs consume identical streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(master ^ 0xA5A5A5A55A5A5A5AULL);
  s = splitmix64(s ^ splitmix64(a));
  s = splitmix64(s ^ splitmix64(b + 0x1000));
  s = splitmix64(s ^ splitmix64(c + 0x2000));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  return std::mt19937_64(derive_seed(master, a, b, c));
}

}  // namespace inclab
