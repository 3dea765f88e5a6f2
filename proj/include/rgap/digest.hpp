#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rgap {

// SHA-256 hex digest of a byte buffer. Used for cache keys, blob addressing
// and tamper detection on stored signal arrays.
std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_hex(const std::string& data);
std::string sha256_hex(const std::vector<std::uint8_t>& data);

// Expands a seed string into `count` doubles in [-1, 1]. Deterministic across
// platforms; the scripted backend uses this to synthesize hidden states.
std::vector<double> digest_expand_unit(const std::string& seed, std::size_t count);

// Deterministic 64-bit hash of a string (FNV-1a); seeds per-token RNG streams.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace rgap
