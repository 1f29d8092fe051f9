#pragma once

#include <cstdint>
#include <string_view>

// Fixed hash primitives shared by the shingler and the MinHash family.
//
// These functions are part of the on-disk format (sketch records embed the
// family version), so their constants must never change silently: bump the
// format version instead.

namespace statedup::hashing {

// FNV-1a, 64 bit.
inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a_step(std::uint64_t h, unsigned char byte) {
    return (h ^ byte) * kFnvPrime;
}

constexpr std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : bytes) h = fnv1a_step(h, c);
    return h;
}

// 64-bit finalizer with full avalanche (the murmur3 fmix64 step).  Used both
// for seeding and as the keyed MinHash function mix64(x ^ seed).
constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDULL;
    x ^= x >> 33;
    x *= 0xC4CEB9FE1A85EC53ULL;
    x ^= x >> 33;
    return x;
}

// splitmix64: advances *state and returns the next value of the stream.
// Injective in the counter, so derived seeds are pairwise distinct.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace statedup::hashing
