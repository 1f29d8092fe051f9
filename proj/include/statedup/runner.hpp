#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "statedup/lsh_index.hpp"
#include "statedup/metrics.hpp"

// End-to-end runs: load a corpus, deduplicate it with the chosen strategy,
// score against ground truth when available, and assemble the report.

namespace statedup {

enum class InputFormat { Directory, Jsonl };
enum class Strategy { MinHash, SimpleHash };

std::string_view to_string(InputFormat f);
std::string_view to_string(Strategy s);

struct RunConfig {
    std::string input;                        // corpus dir or record file
    InputFormat format = InputFormat::Directory;
    DedupConfig dedup;

    // When unset the standard filter applies; an empty list disables
    // filtering entirely.
    std::optional<std::vector<std::string>> exclude_tags;

    std::string truth_path;    // optional id<TAB>label file
    std::string report_path;   // optional; JSON report (a .csv lands next to it)
    Strategy strategy = Strategy::MinHash;

    // Index persistence (minhash only).  load: start from a saved index, so
    // its states count as already seen; parameters must match the run's.
    // save: write the post-scan index for a later resumed run.
    std::string load_index_path;
    std::string save_index_path;
    bool dump_shingles = false;     // embed each document's windows in the report
    bool deterministic = false;     // drop timing fields for byte-stable output
    std::size_t max_bucket_warn = 100;  // warn when a bucket grows past this; 0 = off
    unsigned workers = 1;

    ElementFilter filter() const;
};

// Exit code semantics: 0 clean, 2 completed with per-document failures.
// Fatal problems (unreadable input, bad parameters) throw instead; the CLI
// maps those to exit code 1.
struct RunOutput {
    nlohmann::ordered_json report;
    std::string report_csv;            // flat verdict table
    std::vector<Verdict> verdicts;
    std::optional<ScanMetrics> metrics;
    int exit_code = 0;
};

RunOutput run_dedup(const RunConfig& cfg);

// Same pipeline over an in-memory corpus (no input path needed).
RunOutput run_dedup_docs(const RunConfig& cfg, std::span<const HtmlDocument> docs,
                         const GroundTruth& truth);

// Parameter sweep.  Documents are parsed once; shingle sets are shared
// across cells with the same k, sketches across cells with the same (k,
// hashes) pair.  Ground truth is required - the table exists to compare
// quality across cells.
struct SweepGrid {
    std::vector<std::uint32_t> ks;
    std::vector<std::uint32_t> ells;
    std::vector<double> taus;
};

nlohmann::ordered_json sweep(const RunConfig& cfg, const SweepGrid& grid);

}  // namespace statedup
