#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "statedup/dom.hpp"
#include "statedup/minhash.hpp"

// One hash table per sketch coordinate, keyed by the coordinate's min value;
// each bucket lists the states whose sketch carries that value.  Probing a
// sketch counts, per already-registered state, how many coordinates share a
// bucket — which equals the pairwise sketch agreement count exactly, without
// comparing against every state.

namespace statedup {

struct DedupConfig {
    std::uint32_t k = 12;          // shingle width
    std::uint32_t ell = 200;       // sketch coordinates / tables
    double tau = 0.85;             // duplicate threshold on the agreement fraction
    std::uint64_t master_seed = 1;
};

enum class Decision { NewState, Duplicate, Failed };

std::string_view to_string(Decision d);

struct Verdict {
    std::string probe_id;
    Decision decision = Decision::Failed;
    std::string duplicate_of;            // set iff decision == Duplicate
    std::uint32_t score = 0;             // best per-state agreement count
    double similarity = 0.0;             // score / ell
    std::uint32_t candidates_examined = 0;
    std::string error;                   // set iff decision == Failed
};

struct CandidateCount {
    std::uint32_t ordinal;     // insertion sequence number of the candidate
    std::uint32_t agreements;  // tables where probe and candidate share a bucket
};

struct CandidateCounts {
    std::vector<CandidateCount> entries;  // sorted by ordinal; agreements >= 1
};

class LshIndex {
public:
    explicit LshIndex(const DedupConfig& cfg);

    const DedupConfig& config() const { return cfg_; }
    const HashFamily& family() const { return family_; }
    std::uint32_t registered() const { return static_cast<std::uint32_t>(ids_.size()); }

    const std::string& state_id(std::uint32_t ordinal) const { return ids_.at(ordinal); }
    const MinHashSketch& state_sketch(std::uint32_t ordinal) const { return sketches_.at(ordinal); }
    std::optional<std::uint32_t> ordinal_of(std::string_view id) const;

    // Bucket-count lookup for every state sharing at least one bucket with
    // the probe.  Read-only; safe to call concurrently between insertions.
    // Throws FamilyMismatchError when the sketch length differs from ell.
    CandidateCounts probe(const MinHashSketch& sk) const;

    // probe + arg-max + threshold.  New state iff best score < tau * ell
    // (so a score exactly at the threshold is a duplicate).  Ties go to the
    // earliest-registered state.  Never mutates the index.
    Verdict classify(std::string probe_id, const MinHashSketch& sk) const;

    // Registers a state in all tables (all-or-nothing).  Throws
    // DuplicateIdError / InvalidParamError / FamilyMismatchError.
    void insert(std::string id, MinHashSketch sk);

    std::size_t max_bucket_size() const;

    // Layout written under dir:
    //   index.json   header: format/family versions, config, derived seeds
    //   sketches.bin concatenated sketch records, insertion order
    //   states.tsv   one state id per line, insertion order
    // Buckets are not persisted; load() rebuilds them by re-inserting.
    void save(const std::filesystem::path& dir) const;
    static LshIndex load(const std::filesystem::path& dir);

private:
    DedupConfig cfg_;
    HashFamily family_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> tables_;
    std::vector<std::string> ids_;
    std::vector<MinHashSketch> sketches_;
    std::unordered_map<std::string, std::uint32_t> ordinal_by_id_;
};

struct DedupResult {
    LshIndex index;
    std::vector<Verdict> verdicts;  // one per input document, input order
};

// Sketch-level streaming pass: classify each sketch against everything
// inserted so far, insert it when it is new.  Entries with no sketch carry a
// per-document error message and yield Failed verdicts.
struct PreparedSketch {
    std::string id;
    std::optional<MinHashSketch> sketch;
    std::string error;
};

DedupResult dedup_sketches(std::span<const PreparedSketch> prepared, const DedupConfig& cfg);

// Warm-start variant: scan into an existing index (typically one reloaded
// from disk).  States already registered act as prior knowledge — stream
// documents matching them classify as duplicates, and their ids may not be
// reused by the stream.
DedupResult dedup_sketches(std::span<const PreparedSketch> prepared, LshIndex index);

// Full pipeline over raw documents: parse -> filter -> shingle -> sketch ->
// classify/insert.  Per-document ingest failures become Failed verdicts; the
// stream keeps going.  The preparation stage is pure per document and runs on
// `workers` threads; classification stays sequential in input order, so the
// result is independent of the worker count.
DedupResult dedup_stream(std::span<const HtmlDocument> docs, const DedupConfig& cfg,
                         const ElementFilter& filter = ElementFilter::standard(),
                         unsigned workers = 1);

// The preparation stage on its own, for callers that reuse sketches.
std::vector<PreparedSketch> prepare_sketches(std::span<const HtmlDocument> docs,
                                             const DedupConfig& cfg,
                                             const ElementFilter& filter,
                                             unsigned workers = 1);

}  // namespace statedup
