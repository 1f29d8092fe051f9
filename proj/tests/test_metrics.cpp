#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "helpers.hpp"
#include "statedup/corpus_gen.hpp"
#include "statedup/errors.hpp"
#include "statedup/metrics.hpp"
#include "statedup/shingle.hpp"

using namespace statedup;

namespace {

Verdict new_state(std::string id) {
    Verdict v;
    v.probe_id = std::move(id);
    v.decision = Decision::NewState;
    return v;
}

Verdict duplicate(std::string id, std::string of) {
    Verdict v;
    v.probe_id = std::move(id);
    v.decision = Decision::Duplicate;
    v.duplicate_of = std::move(of);
    return v;
}

Verdict failed(std::string id) {
    Verdict v;
    v.probe_id = std::move(id);
    v.decision = Decision::Failed;
    v.error = "boom";
    return v;
}

// Brute-force recount used as the oracle for evaluate().
ScanMetrics recount(const std::vector<Verdict>& verdicts, const GroundTruth& truth) {
    ScanMetrics m;
    std::unordered_set<std::string> new_labels, seen_labels;
    for (const Verdict& v : verdicts) {
        if (v.decision == Decision::Failed) continue;
        const std::string& label = truth.labels.at(v.probe_id);
        seen_labels.insert(label);
        if (v.decision == Decision::NewState) {
            ++m.reported_unique;
            new_labels.insert(label);
        }
    }
    m.truly_unique_found = new_labels.size();
    for (const std::string& l : seen_labels)
        if (!new_labels.count(l)) ++m.false_merges;
    m.false_splits = m.reported_unique - m.truly_unique_found;
    m.efficiency_degenerate = m.reported_unique == 0;
    m.efficiency = m.efficiency_degenerate
                       ? 1.0
                       : double(m.truly_unique_found) / double(m.reported_unique);
    m.coverage = truth.true_state_count() == 0
                     ? 1.0
                     : double(m.truly_unique_found) / double(truth.true_state_count());
    return m;
}

DomSequence sequence_of(const HtmlDocument& d) { return serialize(parse_html(d)); }

}  // namespace

TEST_CASE("perfect scan scores perfectly") {
    GroundTruth truth;
    truth.labels = {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}};
    std::vector<Verdict> verdicts = {new_state("a1"), duplicate("a2", "a1"), new_state("b1")};

    ScanMetrics m = evaluate(verdicts, truth);
    CHECK(m.reported_unique == 2);
    CHECK(m.truly_unique_found == 2);
    CHECK(m.false_merges == 0);
    CHECK(m.false_splits == 0);
    CHECK(m.efficiency == doctest::Approx(1.0));
    CHECK(m.coverage == doctest::Approx(1.0));
    CHECK(!m.efficiency_degenerate);
}

TEST_CASE("split and merge accounting on a 27-state truth") {
    // 25 reported unique; two of them share a label (one split); the truth
    // holds 27 states total, three of which the scan never surfaced as new.
    GroundTruth truth;
    std::vector<Verdict> verdicts;
    for (int s = 0; s < 24; ++s) {
        std::string id = "s" + std::to_string(s);
        truth.labels[id] = "L" + std::to_string(s);
        verdicts.push_back(new_state(id));
    }
    truth.labels["s0_again"] = "L0";  // same true state, reported new again
    verdicts.push_back(new_state("s0_again"));
    // Two labels only ever merged into something else, one label never seen.
    truth.labels["m1"] = "L24";
    truth.labels["m2"] = "L25";
    truth.labels["unseen"] = "L26";
    verdicts.push_back(duplicate("m1", "s3"));
    verdicts.push_back(duplicate("m2", "s9"));

    ScanMetrics m = evaluate(verdicts, truth);
    CHECK(m.reported_unique == 25);
    CHECK(m.truly_unique_found == 24);
    CHECK(m.false_splits == 1);
    CHECK(m.false_merges == 2);  // L24 and L25 surfaced but never as new
    CHECK(m.efficiency == doctest::Approx(0.96));
    CHECK(m.coverage == doctest::Approx(24.0 / 27.0));

    SUBCASE("the efficiency identity holds") {
        CHECK(std::llround(m.efficiency * double(m.reported_unique)) ==
              std::int64_t(m.truly_unique_found));
    }
    SUBCASE("merge detail names the merged labels and their homes") {
        std::vector<MergedLabel> detail = merge_detail(verdicts, truth);
        REQUIRE(detail.size() == 2);
        CHECK(detail[0].label == "L24");
        REQUIRE(detail[0].documents.size() == 1);
        CHECK(detail[0].documents[0].first == "m1");
        CHECK(detail[0].documents[0].second == "s3");
        CHECK(detail[1].label == "L25");
    }
}

TEST_CASE("evaluate matches a brute-force recount on random scans") {
    testutil::TestRng rng(0x3E7);
    for (int iter = 0; iter < 80; ++iter) {
        GroundTruth truth;
        std::vector<Verdict> verdicts;
        std::vector<std::string> new_ids;
        const int labels = 1 + int(rng.below(8));
        const int docs = 1 + int(rng.below(40));
        for (int d = 0; d < docs; ++d) {
            std::string id = "d" + std::to_string(d);
            truth.labels[id] = "L" + std::to_string(rng.below(labels));
            switch (rng.below(3)) {
                case 0:
                    verdicts.push_back(new_state(id));
                    new_ids.push_back(id);
                    break;
                case 1:
                    if (!new_ids.empty()) {
                        verdicts.push_back(duplicate(id, new_ids[rng.below(new_ids.size())]));
                        break;
                    }
                    [[fallthrough]];
                default:
                    verdicts.push_back(failed(id));
            }
        }
        ScanMetrics got = evaluate(verdicts, truth);
        ScanMetrics want = recount(verdicts, truth);
        CHECK(got.reported_unique == want.reported_unique);
        CHECK(got.truly_unique_found == want.truly_unique_found);
        CHECK(got.false_merges == want.false_merges);
        CHECK(got.false_splits == want.false_splits);
        CHECK(got.efficiency == doctest::Approx(want.efficiency));
        CHECK(got.coverage == doctest::Approx(want.coverage));
        CHECK(got.efficiency_degenerate == want.efficiency_degenerate);

        // Order must not matter.
        std::reverse(verdicts.begin(), verdicts.end());
        ScanMetrics rev = evaluate(verdicts, truth);
        CHECK(rev.reported_unique == got.reported_unique);
        CHECK(rev.truly_unique_found == got.truly_unique_found);
        CHECK(rev.false_merges == got.false_merges);
        CHECK(rev.false_splits == got.false_splits);
    }
}

TEST_CASE("a scan with no new states is degenerate, not divide-by-zero") {
    GroundTruth truth;
    truth.labels = {{"a", "A"}, {"b", "B"}};
    std::vector<Verdict> verdicts = {failed("a"), failed("b")};
    ScanMetrics m = evaluate(verdicts, truth);
    CHECK(m.reported_unique == 0);
    CHECK(m.efficiency == doctest::Approx(1.0));
    CHECK(m.efficiency_degenerate);
    CHECK(m.coverage == doctest::Approx(0.0));
}

TEST_CASE("unlabeled classified documents are an error; unlabeled failures are not") {
    GroundTruth truth;
    truth.labels = {{"a", "A"}};
    CHECK_THROWS_AS(evaluate(std::vector<Verdict>{new_state("ghost")}, truth),
                    MissingLabelError);
    std::vector<Verdict> ok = {new_state("a"), failed("ghost")};
    CHECK_NOTHROW(evaluate(ok, truth));
}

TEST_CASE("empty truth means vacuous coverage") {
    GroundTruth truth;
    ScanMetrics m = evaluate(std::vector<Verdict>{}, truth);
    CHECK(m.coverage == doctest::Approx(1.0));
    CHECK(m.efficiency_degenerate);
}

// ---------------------------------------------------------------- generator

TEST_CASE("generator validates its parameters") {
    GeneratorSpec spec;
    spec.templates = 0;
    CHECK_THROWS_AS(generate_corpus(spec, 1), InvalidParamError);
    spec = GeneratorSpec{};
    spec.variants_per_template = 0;
    CHECK_THROWS_AS(generate_corpus(spec, 1), InvalidParamError);
    spec = GeneratorSpec{};
    spec.element_edit_rate = 1.0;
    CHECK_THROWS_AS(generate_corpus(spec, 1), InvalidParamError);
    spec = GeneratorSpec{};
    spec.element_edit_rate = -0.1;
    CHECK_THROWS_AS(generate_corpus(spec, 1), InvalidParamError);
}

TEST_CASE("generator output shape") {
    GeneratorSpec spec;
    spec.templates = 4;
    spec.variants_per_template = 3;
    GeneratedCorpus corpus = generate_corpus(spec, 11);
    CHECK(corpus.documents.size() == 12);
    CHECK(corpus.truth.labels.size() == 12);
    CHECK(corpus.truth.true_state_count() == 4);

    std::unordered_set<std::string> ids;
    for (const HtmlDocument& d : corpus.documents) {
        CHECK(ids.insert(d.id).second);
        REQUIRE(d.label.has_value());
        CHECK(corpus.truth.labels.at(d.id) == *d.label);
        CHECK(d.raw.substr(0, 15) == "<!doctype html>");
    }
}

TEST_CASE("zero edit rate keeps every variant's element sequence identical") {
    GeneratorSpec spec;
    spec.templates = 3;
    spec.variants_per_template = 5;
    spec.element_edit_rate = 0.0;  // text noise stays on: invisible to tags
    GeneratedCorpus corpus = generate_corpus(spec, 21);

    std::unordered_map<std::string, DomSequence> first_of_label;
    bool text_varies = false;
    std::unordered_map<std::string, std::string> first_raw;
    for (const HtmlDocument& d : corpus.documents) {
        DomSequence s = sequence_of(d);
        auto [it, inserted] = first_of_label.try_emplace(*d.label, s);
        if (!inserted) CHECK(s == it->second);
        auto [rit, rinserted] = first_raw.try_emplace(*d.label, d.raw);
        if (!rinserted && d.raw != rit->second) text_varies = true;
    }
    CHECK(text_varies);  // the bytes differ even though the structure doesn't
}

TEST_CASE("template sizes stay inside the configured band") {
    GeneratorSpec spec;
    spec.templates = 6;
    spec.variants_per_template = 1;
    spec.element_edit_rate = 0.0;
    GeneratedCorpus corpus = generate_corpus(spec, 31);
    for (const HtmlDocument& d : corpus.documents) {
        const std::size_t n = sequence_of(d).length();
        CHECK(n >= spec.min_tokens);
        CHECK(n <= spec.max_tokens);
    }
}

TEST_CASE("repeat expansion never changes the shingle set") {
    GeneratorSpec spec;
    spec.templates = 3;
    spec.variants_per_template = 6;
    spec.element_edit_rate = 0.0;
    spec.repeat_expansion = true;
    GeneratedCorpus corpus = generate_corpus(spec, 41);

    std::unordered_map<std::string, ShingleSet> set_of_label;
    std::unordered_map<std::string, std::unordered_set<std::size_t>> lengths;
    for (const HtmlDocument& d : corpus.documents) {
        DomSequence s = sequence_of(d);
        lengths[*d.label].insert(s.length());
        ShingleSet sh = shingle(s, ShingleParams{spec.shingle_k});
        auto [it, inserted] = set_of_label.try_emplace(*d.label, sh);
        if (!inserted) CHECK(sh == it->second);
    }
    // The document lengths really do vary, so the equality above is earned.
    bool any_varied = false;
    for (const auto& [label, ls] : lengths) any_varied = any_varied || ls.size() > 1;
    CHECK(any_varied);
}

TEST_CASE("popup injection appends one fixed block at the end or nothing") {
    GeneratorSpec spec;
    spec.templates = 2;
    spec.variants_per_template = 12;
    spec.element_edit_rate = 0.0;
    spec.popup_injection = true;
    GeneratedCorpus corpus = generate_corpus(spec, 51);

    std::unordered_map<std::string, std::size_t> base_len;
    for (const HtmlDocument& d : corpus.documents) {
        std::size_t len = sequence_of(d).length();
        auto it = base_len.find(*d.label);
        if (it == base_len.end())
            base_len[*d.label] = len;
        else
            base_len[*d.label] = std::min(base_len[*d.label], len);
    }
    std::size_t with_popup = 0;
    for (const HtmlDocument& d : corpus.documents) {
        DomSequence s = sequence_of(d);
        const std::size_t base = base_len[*d.label];
        CHECK((s.length() == base || s.length() > base));
        if (s.length() > base) ++with_popup;
    }
    CHECK(with_popup > 0);
    CHECK(with_popup < corpus.documents.size());
}

TEST_CASE("component shuffle permutes blocks without changing the token bag") {
    GeneratorSpec spec;
    spec.templates = 2;
    spec.variants_per_template = 8;
    spec.element_edit_rate = 0.0;
    spec.component_shuffle = true;
    GeneratedCorpus corpus = generate_corpus(spec, 61);

    std::unordered_map<std::string, std::vector<std::string>> sorted_of_label;
    std::unordered_map<std::string, std::unordered_set<std::uint64_t>> orders;
    for (const HtmlDocument& d : corpus.documents) {
        DomSequence s = sequence_of(d);
        orders[*d.label].insert(sequence_hash(s));
        std::vector<std::string> bag = s.elements;
        std::sort(bag.begin(), bag.end());
        auto [it, inserted] = sorted_of_label.try_emplace(*d.label, bag);
        if (!inserted) CHECK(bag == it->second);
    }
    bool any_reordered = false;
    for (const auto& [label, hashes] : orders) any_reordered = any_reordered || hashes.size() > 1;
    CHECK(any_reordered);
}

TEST_CASE("generation is deterministic per seed") {
    GeneratorSpec spec;
    spec.templates = 2;
    spec.variants_per_template = 3;
    GeneratedCorpus a = generate_corpus(spec, 99);
    GeneratedCorpus b = generate_corpus(spec, 99);
    REQUIRE(a.documents.size() == b.documents.size());
    for (std::size_t i = 0; i < a.documents.size(); ++i) {
        CHECK(a.documents[i].id == b.documents[i].id);
        CHECK(a.documents[i].raw == b.documents[i].raw);
        CHECK(a.documents[i].label == b.documents[i].label);
    }
    GeneratedCorpus c = generate_corpus(spec, 100);
    CHECK(a.documents[0].raw != c.documents[0].raw);
}

TEST_CASE("small corpus separates cleanly under the exact-overlap oracle") {
    GeneratorSpec spec;
    spec.templates = 6;
    spec.variants_per_template = 4;
    GeneratedCorpus corpus = generate_corpus(spec, 71);

    std::vector<ShingleSet> sets;
    std::vector<std::string> labels;
    for (const HtmlDocument& d : corpus.documents) {
        sets.push_back(shingle(sequence_of(d), ShingleParams{12}));
        labels.push_back(*d.label);
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            const double jac = exact_jaccard(sets[i], sets[j]);
            CAPTURE(i);
            CAPTURE(j);
            if (labels[i] == labels[j])
                CHECK(jac >= 0.9);
            else
                CHECK(jac <= 0.4);
        }
    }
}
