#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "statedup/lsh_index.hpp"

// Scan-quality accounting against ground truth: how many of the reported
// unique states are genuinely distinct (efficiency) and how much of the real
// state space was found (coverage).

namespace statedup {

struct GroundTruth {
    std::unordered_map<std::string, std::string> labels;  // state id -> true label

    std::size_t true_state_count() const;  // distinct labels
    bool empty() const { return labels.empty(); }
};

struct ScanMetrics {
    std::size_t reported_unique = 0;     // NewState verdicts
    std::size_t truly_unique_found = 0;  // distinct labels among them
    std::size_t false_merges = 0;        // labels in the corpus never reported new
    std::size_t false_splits = 0;        // reported_unique - truly_unique_found
    double efficiency = 1.0;             // truly_unique_found / reported_unique
    double coverage = 0.0;               // truly_unique_found / true_state_count
    bool efficiency_degenerate = false;  // no NewState verdicts at all
};

// Failed verdicts are skipped (they were never classified).  Every remaining
// verdict's probe_id must be labeled; otherwise MissingLabelError.
ScanMetrics evaluate(std::span<const Verdict> verdicts, const GroundTruth& truth);

// Attribution for each false merge: the label, its documents and where each
// one was merged.  Detail view for reports; the headline numbers above stay
// label-level.
struct MergedLabel {
    std::string label;
    std::vector<std::pair<std::string, std::string>> documents;  // id -> merged into
};

std::vector<MergedLabel> merge_detail(std::span<const Verdict> verdicts, const GroundTruth& truth);

}  // namespace statedup
