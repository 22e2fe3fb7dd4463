#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace specwatch {

// FNV-1a 64-bit. Used for config/content fingerprints and seed derivation,
// not for anything adversarial.
constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001b3ull;

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset) {
  return fnv1a64(s.data(), s.size(), h);
}

std::string hash_hex(uint64_t h);

// Streaming hash of a file's bytes; throws MissingInputError if absent.
uint64_t hash_file(const std::string& path);

// Stage seed derivation: hash of master seed bytes then the stage name.
inline uint64_t derive_seed(uint64_t master_seed, std::string_view stage) {
  uint64_t h = fnv1a64(&master_seed, sizeof(master_seed));
  return fnv1a64(stage, h);
}

}  // namespace specwatch
