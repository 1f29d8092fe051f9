#include "statedup/minhash.hpp"

#include <istream>
#include <limits>
#include <ostream>

#include "statedup/errors.hpp"
#include "statedup/hashing.hpp"

namespace statedup {

HashFamily::HashFamily(std::uint32_t ell, std::uint64_t master_seed)
    : master_seed_(master_seed) {
    if (ell == 0) throw InvalidParamError("hash family needs at least one function");
    seeds_.reserve(ell);
    std::uint64_t state = master_seed;
    for (std::uint32_t i = 0; i < ell; ++i) seeds_.push_back(hashing::splitmix64(state));
}

std::uint64_t HashFamily::value(std::uint32_t i, std::uint64_t x) const {
    return hashing::mix64(x ^ seeds_[i]);
}

MinHashSketch sketch(const ShingleSet& set, const HashFamily& family) {
    if (set.empty()) throw EmptySetError("cannot sketch an empty shingle set");
    MinHashSketch sk;
    sk.mins.assign(family.size(), std::numeric_limits<std::uint64_t>::max());
    const auto& seeds = family.seeds();
    for (std::uint64_t fp : set.fingerprints) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            std::uint64_t v = hashing::mix64(fp ^ seeds[i]);
            if (v < sk.mins[i]) sk.mins[i] = v;
        }
    }
    return sk;
}

SimilarityEstimate estimate_jaccard(const MinHashSketch& a, const MinHashSketch& b) {
    if (a.size() != b.size())
        throw FamilyMismatchError("sketch lengths differ: " + std::to_string(a.size()) +
                                  " vs " + std::to_string(b.size()));
    SimilarityEstimate est{0, a.size()};
    for (std::uint32_t i = 0; i < a.size(); ++i)
        if (a.mins[i] == b.mins[i]) ++est.agreements;
    return est;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
    char b[4];
    if (!in.read(b, 4)) throw FormatError("sketch record truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    char b[8];
    if (!in.read(b, 8)) throw FormatError("sketch record truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

}  // namespace

void write_sketch(std::ostream& out, const MinHashSketch& sk, const HashFamily& family) {
    if (sk.size() != family.size())
        throw FamilyMismatchError("sketch length does not match the family");
    out.write(kSketchMagic, 4);
    put_u32(out, kSketchFormatVersion);
    put_u32(out, sk.size());
    put_u64(out, family.master_seed());
    for (std::uint64_t v : sk.mins) put_u64(out, v);
    if (!out) throw IoError("failed to write sketch record");
}

SketchRecord read_sketch(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4)) throw FormatError("sketch record truncated");
    if (std::string_view(magic, 4) != std::string_view(kSketchMagic, 4))
        throw FormatError("bad sketch magic");
    const std::uint32_t version = get_u32(in);
    if (version != kSketchFormatVersion)
        throw FormatError("unsupported sketch format version " + std::to_string(version));
    SketchRecord rec;
    rec.ell = get_u32(in);
    if (rec.ell == 0) throw FormatError("sketch record with zero coordinates");
    rec.master_seed = get_u64(in);
    rec.sketch.mins.reserve(rec.ell);
    for (std::uint32_t i = 0; i < rec.ell; ++i) rec.sketch.mins.push_back(get_u64(in));
    return rec;
}

}  // namespace statedup
