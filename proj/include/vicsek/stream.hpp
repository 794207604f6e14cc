#pragma once

#include <cstdint>

namespace vicsek {

// splitmix64 finalizer; the mixing primitive behind every seeded draw.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the draw for a key is a pure function of
// (seed, purpose, k0, k1, k2). Evaluation order never matters, so signals
// stay total functions of time and adding agents does not reshuffle draws.
constexpr std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t purpose,
                                   std::uint64_t k0, std::uint64_t k1 = 0,
                                   std::uint64_t k2 = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ purpose);
  h = mix64(h ^ k0);
  h = mix64(h ^ k1);
  h = mix64(h ^ k2);
  return h;
}

// Uniform draw in [0, 1).
constexpr double keyed_unit(std::uint64_t seed, std::uint64_t purpose,
                            std::uint64_t k0, std::uint64_t k1 = 0,
                            std::uint64_t k2 = 0) {
  return static_cast<double>(keyed_bits(seed, purpose, k0, k1, k2) >> 11) *
         0x1.0p-53;
}

// Domain-separation tags so edge draws and heading draws never collide.
inline constexpr std::uint64_t kEdgeStream = 0x45444745;
inline constexpr std::uint64_t kHeadingStream = 0x48454144;

}  // namespace vicsek
