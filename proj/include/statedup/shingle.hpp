#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "statedup/dom.hpp"

// Turns a tag sequence into the set of its k-grams, each hashed to a 64-bit
// fingerprint.  Equal fingerprint sets ~ structurally equal pages.

namespace statedup {

struct ShingleParams {
    std::uint32_t k = 12;  // window width in tags
};

struct ShingleSet {
    std::unordered_set<std::uint64_t> fingerprints;

    std::size_t cardinality() const { return fingerprints.size(); }
    bool empty() const { return fingerprints.empty(); }
    bool contains(std::uint64_t fp) const { return fingerprints.count(fp) > 0; }
    bool operator==(const ShingleSet&) const = default;
};

// FNV-1a over the window's tokens, each followed by a 0x00 separator, so
// token boundaries can never alias ("ab","c" vs "a","bc").
std::uint64_t fingerprint_window(std::span<const std::string> tokens);

// Whole-sequence hash, order preserved (same token/separator stream as
// fingerprint_window but over all tokens).  Also serves as the exact-equality
// baseline strategy.
std::uint64_t sequence_hash(const DomSequence& seq);

// Sequences shorter than k collapse to one fingerprint: the whole-sequence
// hash mixed with a marker and the token count.  Keeps tiny pages (and empty
// ones) comparable by plain equality instead of yielding an empty set.
std::uint64_t short_sequence_fingerprint(const DomSequence& seq);

// All k-token windows of seq, fingerprinted.  Throws InvalidParamError when
// params.k == 0.  Never returns an empty set: len < k falls back to
// short_sequence_fingerprint.
ShingleSet shingle(const DomSequence& seq, ShingleParams params);

// Human-readable windows (space-joined tokens) in sequence order, for
// inspection tooling.  Mirrors the windows shingle() fingerprints; short
// sequences yield one pseudo-window covering every token.
std::vector<std::string> shingle_windows(const DomSequence& seq, ShingleParams params);

// |a ∩ b| / |a ∪ b|.  Throws BothEmptyError when both sets are empty.
double exact_jaccard(const ShingleSet& a, const ShingleSet& b);

}  // namespace statedup
