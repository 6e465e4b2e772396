#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace authentigpt {

// FNV-1a, 64-bit. Stable across platforms; used for seed derivation and
// feature hashing, not for anything adversarial.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    state ^= static_cast<std::uint64_t>(c);
    state *= 0x100000001b3ULL;
  }
  return state;
}

// SHA-256 of the input, as a lowercase hex string. Content-addressed cache
// keys and input digests go through this.
std::string sha256_hex(std::string_view bytes);

}  // namespace authentigpt
