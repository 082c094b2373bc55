#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace iscan {

using RngEngine = std::mt19937_64;

// splitmix64 finalizer; good avalanche behavior for seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent stream seed from (master, purpose tag, indices).
// Every consumer of randomness pulls its own derived stream, so results do
// not depend on scheduling or evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix64(master ^ fnv1a64(tag));
  h = mix64(h ^ (a * 0xd6e8feb86659fd93ULL));
  h = mix64(h ^ (b * 0xa0761d6478bd642fULL));
  return h;
}

inline RngEngine make_engine(std::uint64_t seed) { return RngEngine(seed); }

}  // namespace iscan
