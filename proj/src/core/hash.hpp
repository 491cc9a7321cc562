#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace isic {

// FNV-1a, 64-bit. Used by the hashing embedding provider and for seed mixing.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Lowercase hex digest of the SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace isic
