#ifndef HDMI_SEED_HPP
#define HDMI_SEED_HPP

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace hdmi {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent sub-seed from a parent seed and a sequence of keys.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                           std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(parent);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// FNV-1a of a stream name, for labelling sub-streams by role.
inline constexpr std::uint64_t stream_key(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Maps a 64-bit hash onto [-1, 1).
inline double unit_symmetric(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

inline std::uint64_t bits_of(double v) {
  if (v == 0.0) v = 0.0;  // fold -0 onto +0
  return std::bit_cast<std::uint64_t>(v);
}

}  // namespace hdmi

#endif  // HDMI_SEED_HPP
