#include "statedup/shingle.hpp"

#include "statedup/errors.hpp"
#include "statedup/hashing.hpp"

namespace statedup {

namespace {

// Mixed into short-sequence fingerprints so they cannot collide with a
// regular window fingerprint by construction intent (see header).
constexpr std::uint64_t kShortSequenceTag = 0x73686F7274736571ULL;  // "shortseq"

std::uint64_t fnv_tokens(std::span<const std::string> tokens) {
    std::uint64_t h = hashing::kFnvOffset;
    for (const std::string& t : tokens) {
        h = hashing::fnv1a(t, h);
        h = hashing::fnv1a_step(h, 0x00);
    }
    return h;
}

}  // namespace

std::uint64_t fingerprint_window(std::span<const std::string> tokens) {
    return fnv_tokens(tokens);
}

std::uint64_t sequence_hash(const DomSequence& seq) {
    return fnv_tokens(seq.elements);
}

std::uint64_t short_sequence_fingerprint(const DomSequence& seq) {
    return hashing::mix64(sequence_hash(seq) ^ kShortSequenceTag ^
                          static_cast<std::uint64_t>(seq.length()));
}

ShingleSet shingle(const DomSequence& seq, ShingleParams params) {
    if (params.k == 0) throw InvalidParamError("shingle width k must be positive");
    ShingleSet set;
    const std::size_t n = seq.length();
    const std::size_t k = params.k;
    if (n < k) {
        set.fingerprints.insert(short_sequence_fingerprint(seq));
        return set;
    }
    set.fingerprints.reserve(n - k + 1);
    std::span<const std::string> all(seq.elements);
    for (std::size_t i = 0; i + k <= n; ++i)
        set.fingerprints.insert(fnv_tokens(all.subspan(i, k)));
    return set;
}

std::vector<std::string> shingle_windows(const DomSequence& seq, ShingleParams params) {
    if (params.k == 0) throw InvalidParamError("shingle width k must be positive");
    const std::size_t n = seq.length();
    const std::size_t k = params.k;
    auto join = [&](std::size_t from, std::size_t count) {
        std::string out;
        for (std::size_t i = 0; i < count; ++i) {
            if (i) out += ' ';
            out += seq.elements[from + i];
        }
        return out;
    };
    if (n < k) return {join(0, n)};
    std::vector<std::string> windows;
    windows.reserve(n - k + 1);
    for (std::size_t i = 0; i + k <= n; ++i) windows.push_back(join(i, k));
    return windows;
}

double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
    if (a.empty() && b.empty())
        throw BothEmptyError("Jaccard similarity of two empty sets is undefined");
    const ShingleSet& small = a.cardinality() <= b.cardinality() ? a : b;
    const ShingleSet& big = a.cardinality() <= b.cardinality() ? b : a;
    std::size_t inter = 0;
    for (std::uint64_t fp : small.fingerprints)
        if (big.contains(fp)) ++inter;
    const std::size_t uni = a.cardinality() + b.cardinality() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace statedup
