#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "statedup/corpus_gen.hpp"
#include "statedup/dom.hpp"
#include "statedup/metrics.hpp"

// Corpus readers and writers.
//
// Directory corpora: every *.html / *.htm file, the file stem is the state
// id, loaded in lexicographic filename order.
// Record files: one JSON object per line with fields "id", "html" and an
// optional "label".
// Truth files: one "id<TAB>label" pair per line; blank lines and lines
// starting with '#' are skipped.

namespace statedup {

std::vector<HtmlDocument> load_corpus_dir(const std::filesystem::path& dir);
std::vector<HtmlDocument> load_corpus_jsonl(const std::filesystem::path& file);

GroundTruth load_truth_tsv(const std::filesystem::path& file);

// Collects the labels already present on the documents (empty result when
// none carry one).
GroundTruth truth_from_documents(std::span<const HtmlDocument> docs);

// Writes <id>.html per document plus truth.tsv for the labeled ones.
void write_corpus_dir(const std::filesystem::path& dir, const GeneratedCorpus& corpus);
void write_corpus_jsonl(const std::filesystem::path& file, std::span<const HtmlDocument> docs);

}  // namespace statedup
