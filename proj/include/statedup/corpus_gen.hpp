#pragma once

#include <cstdint>
#include <vector>

#include "statedup/dom.hpp"
#include "statedup/metrics.hpp"

// Synthetic corpora with known ground truth: a set of structurally distinct
// page templates, each emitted as a family of near-duplicate variants.

namespace statedup {

struct GeneratorSpec {
    std::uint32_t templates = 20;
    std::uint32_t variants_per_template = 25;

    // Element insert/delete/replace operations per variant, as a fraction of
    // the template's token count (rounded to the nearest integer).  0 keeps
    // every variant structurally identical to its template.
    double element_edit_rate = 0.0015;

    // Re-randomize text content per variant.  Invisible to the tag sequence.
    bool text_noise = true;

    // Optional perturbation modes.
    bool component_shuffle = false;  // permute the order of top-level blocks
    bool repeat_expansion = false;   // vary the repetition count of a uniform list
    bool popup_injection = false;    // some variants get a fixed overlay appended

    // Repeated-list items are sized to at least this window width minus one
    // token, so repeat_expansion changes no k-gram of that width.
    std::uint32_t shingle_k = 12;

    // Template size band (tokens of the full tag sequence).
    std::uint32_t min_tokens = 560;
    std::uint32_t max_tokens = 760;
};

struct GeneratedCorpus {
    std::vector<HtmlDocument> documents;  // labels filled in
    GroundTruth truth;
};

// Deterministic: the same spec and seed give byte-identical documents, on any
// platform.  Throws InvalidParamError on zero counts or a rate outside [0, 1).
GeneratedCorpus generate_corpus(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace statedup
