#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "statedup/shingle.hpp"

// MinHash sketches: ell seeded hash functions, each contributing the minimum
// value it takes over a shingle set.  The fraction of agreeing coordinates of
// two sketches is an unbiased estimate of the sets' Jaccard similarity, with
// standard error ~ sqrt(J(1-J)/ell).

namespace statedup {

// Family "mix64-v1": h_i(x) = mix64(x ^ seed_i), seeds drawn from the
// splitmix64 stream started at master_seed.  The name is recorded in
// persisted indexes; changing the construction requires a new name.
class HashFamily {
public:
    static constexpr std::string_view kName = "mix64-v1";

    // Throws InvalidParamError when ell == 0.
    HashFamily(std::uint32_t ell, std::uint64_t master_seed);

    std::uint32_t size() const { return static_cast<std::uint32_t>(seeds_.size()); }
    std::uint64_t master_seed() const { return master_seed_; }
    const std::vector<std::uint64_t>& seeds() const { return seeds_; }

    std::uint64_t value(std::uint32_t i, std::uint64_t x) const;

    bool operator==(const HashFamily&) const = default;

private:
    std::uint64_t master_seed_;
    std::vector<std::uint64_t> seeds_;
};

// Stores min values (not arg-min elements): two sets agreeing on a
// coordinate's value virtually always share the minimizing element; a stray
// 64-bit collision (~2^-64 per coordinate) only nudges one estimate.
struct MinHashSketch {
    std::vector<std::uint64_t> mins;

    std::uint32_t size() const { return static_cast<std::uint32_t>(mins.size()); }
    bool operator==(const MinHashSketch&) const = default;
};

// Throws EmptySetError when the set has no fingerprints.
MinHashSketch sketch(const ShingleSet& set, const HashFamily& family);

struct SimilarityEstimate {
    std::uint32_t agreements = 0;
    std::uint32_t ell = 0;

    double value() const { return ell ? static_cast<double>(agreements) / ell : 0.0; }
};

// Coordinate agreement fraction.  Throws FamilyMismatchError when the
// sketches have different lengths.
SimilarityEstimate estimate_jaccard(const MinHashSketch& a, const MinHashSketch& b);

// Binary sketch record, all integers little-endian:
//   bytes 0..3   magic "MHSK"
//   bytes 4..7   u32 format version (currently 1)
//   bytes 8..11  u32 ell
//   bytes 12..19 u64 master seed of the family that produced the values
//   then ell u64 min values.
inline constexpr char kSketchMagic[4] = {'M', 'H', 'S', 'K'};
inline constexpr std::uint32_t kSketchFormatVersion = 1;

struct SketchRecord {
    std::uint32_t ell = 0;
    std::uint64_t master_seed = 0;
    MinHashSketch sketch;
};

void write_sketch(std::ostream& out, const MinHashSketch& sk, const HashFamily& family);
// Throws FormatError on bad magic/version/layout, IoError on stream failure.
SketchRecord read_sketch(std::istream& in);

}  // namespace statedup
