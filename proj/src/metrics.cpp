#include "statedup/metrics.hpp"

#include <algorithm>
#include <unordered_set>

#include "statedup/errors.hpp"

namespace statedup {

std::size_t GroundTruth::true_state_count() const {
    std::unordered_set<std::string_view> distinct;
    for (const auto& [id, label] : labels) distinct.insert(label);
    return distinct.size();
}

namespace {

const std::string& label_of(const GroundTruth& truth, const std::string& id) {
    auto it = truth.labels.find(id);
    if (it == truth.labels.end())
        throw MissingLabelError("no ground-truth label for state '" + id + "'");
    return it->second;
}

}  // namespace

ScanMetrics evaluate(std::span<const Verdict> verdicts, const GroundTruth& truth) {
    ScanMetrics m;
    std::unordered_set<std::string_view> labels_reported_new;
    std::unordered_set<std::string_view> labels_in_corpus;
    for (const Verdict& v : verdicts) {
        if (v.decision == Decision::Failed) continue;
        const std::string& label = label_of(truth, v.probe_id);
        labels_in_corpus.insert(label);
        if (v.decision == Decision::NewState) {
            ++m.reported_unique;
            labels_reported_new.insert(label);
        }
    }
    m.truly_unique_found = labels_reported_new.size();
    for (std::string_view label : labels_in_corpus)
        if (!labels_reported_new.count(label)) ++m.false_merges;
    m.false_splits = m.reported_unique - m.truly_unique_found;
    if (m.reported_unique == 0) {
        m.efficiency = 1.0;  // vacuous: nothing was reported
        m.efficiency_degenerate = true;
    } else {
        m.efficiency = static_cast<double>(m.truly_unique_found) /
                       static_cast<double>(m.reported_unique);
    }
    const std::size_t total = truth.true_state_count();
    m.coverage = total == 0 ? 1.0
                            : static_cast<double>(m.truly_unique_found) /
                                  static_cast<double>(total);
    return m;
}

std::vector<MergedLabel> merge_detail(std::span<const Verdict> verdicts, const GroundTruth& truth) {
    std::unordered_set<std::string_view> labels_reported_new;
    for (const Verdict& v : verdicts)
        if (v.decision == Decision::NewState) labels_reported_new.insert(label_of(truth, v.probe_id));

    std::vector<MergedLabel> out;
    std::unordered_map<std::string_view, std::size_t> row_of;
    for (const Verdict& v : verdicts) {
        if (v.decision != Decision::Duplicate) continue;
        const std::string& label = label_of(truth, v.probe_id);
        if (labels_reported_new.count(label)) continue;  // label was found elsewhere
        auto [it, inserted] = row_of.try_emplace(label, out.size());
        if (inserted) out.push_back({label, {}});
        out[it->second].documents.emplace_back(v.probe_id, v.duplicate_of);
    }
    std::sort(out.begin(), out.end(),
              [](const MergedLabel& a, const MergedLabel& b) { return a.label < b.label; });
    return out;
}

}  // namespace statedup
