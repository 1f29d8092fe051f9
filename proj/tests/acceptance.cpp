// End-to-end acceptance checks.  Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.  All randomness is
// seeded, so every number below is reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "statedup/corpus_gen.hpp"
#include "statedup/corpus_io.hpp"
#include "statedup/dom.hpp"
#include "statedup/hashing.hpp"
#include "statedup/lsh_index.hpp"
#include "statedup/metrics.hpp"
#include "statedup/minhash.hpp"
#include "statedup/runner.hpp"
#include "statedup/shingle.hpp"

using namespace statedup;

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name,
                detail.c_str());
    if (!pass) ++g_failures;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() { return hashing::splitmix64(state_); }
    std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

ShingleSet random_set(Rng& rng, std::size_t n) {
    ShingleSet s;
    while (s.cardinality() < n) s.fingerprints.insert(rng.next());
    return s;
}

// A pair of n-element sets sharing exactly `shared` elements.
std::pair<ShingleSet, ShingleSet> overlapping_pair(Rng& rng, std::size_t n, std::size_t shared) {
    ShingleSet common = random_set(rng, shared);
    ShingleSet a = common, b = common;
    while (a.cardinality() < n) a.fingerprints.insert(rng.next());
    while (b.cardinality() < n) {
        std::uint64_t x = rng.next();
        if (!a.contains(x)) b.fingerprints.insert(x);
    }
    return {std::move(a), std::move(b)};
}

SimilarityEstimate slice_estimate(const MinHashSketch& a, const MinHashSketch& b,
                                  std::uint32_t ell) {
    SimilarityEstimate e;
    e.ell = ell;
    for (std::uint32_t i = 0; i < ell; ++i)
        if (a.mins[i] == b.mins[i]) ++e.agreements;
    return e;
}

// ---------------------------------------------------------------------------
// 1 & 3: estimator accuracy at the default sketch size, and error shrinkage
// when the sketch grows 4x.  The 800-hash family extends the 200-hash one
// (same seed stream), so one sketch serves both measurements.

double g_mae_200 = 0.0, g_mae_800 = 0.0;

void criteria_1_and_3() {
    const std::size_t pairs = 1000;
    const std::size_t n = 400;
    HashFamily family(800, 1);
    Rng rng(101);

    double err200 = 0.0, err800 = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
        const double target = double(p) / double(pairs);  // sweep J across [0,1)
        const std::size_t shared =
            std::min(n, static_cast<std::size_t>(std::llround(2.0 * n * target / (1.0 + target))));
        auto [a, b] = overlapping_pair(rng, n, shared);
        const double jac = double(shared) / double(2 * n - shared);

        MinHashSketch sa = sketch(a, family), sb = sketch(b, family);
        err200 += std::abs(slice_estimate(sa, sb, 200).value() - jac);
        err800 += std::abs(slice_estimate(sa, sb, 800).value() - jac);
    }
    g_mae_200 = err200 / double(pairs);
    g_mae_800 = err800 / double(pairs);

    char detail[128];
    std::snprintf(detail, sizeof detail, "mean |estimate - J| = %.4f over %zu pairs, 200 hashes",
                  g_mae_200, pairs);
    report(1, "sketch agreement estimates Jaccard within 0.07", g_mae_200 <= 0.07, detail);
}

void criterion_3() {
    const double ratio = g_mae_800 / g_mae_200;
    char detail[128];
    std::snprintf(detail, sizeof detail, "MAE %.4f @800 vs %.4f @200, ratio %.3f (need <= 0.55)",
                  g_mae_800, g_mae_200, ratio);
    report(3, "quadrupling the sketch halves the mean error", ratio <= 0.55, detail);
}

// ---------------------------------------------------------------------------
// 2: per-coordinate unbiasedness — across many independent one-hash
// families, the agreement frequency of a fixed pair approaches its Jaccard.

void criterion_2() {
    const std::uint32_t families = 400;
    const std::size_t n = 300;
    Rng rng(202);
    std::size_t ok = 0;
    double worst = 0.0;
    for (int p = 0; p < 20; ++p) {
        const std::size_t shared = 30 + std::size_t(rng.below(260));
        auto [a, b] = overlapping_pair(rng, n, shared);
        const double jac = double(shared) / double(2 * n - shared);

        std::uint32_t hits = 0;
        for (std::uint32_t f = 0; f < families; ++f) {
            HashFamily one(1, 50000 + 1000 * std::uint64_t(p) + f);
            hits += estimate_jaccard(sketch(a, one), sketch(b, one)).agreements;
        }
        const double freq = double(hits) / double(families);
        const double bound = 3.0 * std::sqrt(jac * (1.0 - jac) / double(families));
        worst = std::max(worst, std::abs(freq - jac) - bound);
        if (std::abs(freq - jac) <= bound) ++ok;
    }
    char detail[128];
    std::snprintf(detail, sizeof detail, "%zu/20 pairs within 3 standard errors of J", ok);
    report(2, "single-coordinate agreement frequency is unbiased", ok >= 19, detail);
}

// ---------------------------------------------------------------------------
// 4: bucket-count probing must reproduce pairwise agreement counts exactly.

void criterion_4() {
    DedupConfig cfg;  // 200 hashes
    LshIndex idx(cfg);
    Rng rng(404);

    std::vector<ShingleSet> bases;
    for (int b = 0; b < 12; ++b) bases.push_back(random_set(rng, 250));
    std::vector<MinHashSketch> all;
    for (int i = 0; i < 500; ++i) {
        ShingleSet s = bases[rng.below(bases.size())];
        const std::size_t extra = rng.below(60);
        for (std::size_t m = 0; m < extra; ++m) s.fingerprints.insert(rng.next());
        all.push_back(sketch(s, idx.family()));
        idx.insert("d" + std::to_string(i), all.back());
    }

    std::size_t mismatches = 0, zero_hidden = 0, candidate_rows = 0;
    for (int p = 0; p < 500; ++p) {
        CandidateCounts c = idx.probe(all[p]);
        std::vector<std::uint32_t> got(500, 0);
        for (const CandidateCount& e : c.entries) got[e.ordinal] = e.agreements;
        candidate_rows += c.entries.size();
        for (int j = 0; j < 500; ++j) {
            const std::uint32_t want = estimate_jaccard(all[p], all[j]).agreements;
            if (got[j] != want) ++mismatches;
            if (want > 0 && got[j] == 0) ++zero_hidden;
        }
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "%zu mismatches, %zu hidden overlaps across 250000 pairs (%zu candidate rows)",
                  mismatches, zero_hidden, candidate_rows);
    report(4, "probe counts equal exact sketch agreements", mismatches == 0 && zero_hidden == 0,
           detail);
}

// ---------------------------------------------------------------------------
// 5: the bundled table sample must shingle to its exact 5-token window set.

void criterion_5(const fs::path& data_dir) {
    const fs::path sample = data_dir / "sample_table.html";
    HtmlDocument doc{"sample", "", std::nullopt};
    {
        std::FILE* f = std::fopen(sample.string().c_str(), "rb");
        if (!f) {
            report(5, "bundled sample page shingles to its known 5-mer set", false,
                   "cannot open " + sample.string());
            return;
        }
        char buf[4096];
        std::size_t got;
        while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) doc.raw.append(buf, got);
        std::fclose(f);
    }

    DomSequence seq = serialize(parse_html(doc), ElementFilter::none());
    const std::vector<std::string> expected_windows = {
        "html head title body table", "head title body table tr", "title body table tr td",
        "body table tr td td",        "table tr td td tr",        "tr td td tr td",
        "td td tr td td",
    };
    const std::vector<std::string> got_windows = shingle_windows(seq, ShingleParams{5});
    ShingleSet set = shingle(seq, ShingleParams{5});

    bool pass = got_windows == expected_windows && set.cardinality() == 7;
    char detail[128];
    std::snprintf(detail, sizeof detail, "%zu windows, cardinality %zu", got_windows.size(),
                  set.cardinality());
    report(5, "bundled sample page shingles to its known 5-mer set", pass, detail);
}

// ---------------------------------------------------------------------------
// 6: whatever a whole-sequence hash calls identical, the scan calls duplicate.

void criterion_6() {
    GeneratorSpec spec;
    spec.templates = 200;
    spec.variants_per_template = 2;
    spec.element_edit_rate = 0.0;  // text-only differences
    GeneratedCorpus corpus = generate_corpus(spec, 606);

    DedupResult res = dedup_stream(corpus.documents, DedupConfig{});

    std::unordered_set<std::uint64_t> seen_hashes;
    std::size_t checked = 0, violations = 0;
    std::vector<std::uint64_t> hash_of(corpus.documents.size());
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        DomSequence s = serialize(parse_html(corpus.documents[i]));
        hash_of[i] = sequence_hash(s);
        if (seen_hashes.count(hash_of[i])) {
            ++checked;
            if (res.verdicts[i].decision != Decision::Duplicate) ++violations;
        }
        seen_hashes.insert(hash_of[i]);
    }
    char detail[128];
    std::snprintf(detail, sizeof detail, "%zu equal-hash documents, %zu misclassified", checked,
                  violations);
    report(6, "equal whole-sequence hashes always classify as duplicates",
           checked >= 200 && violations == 0, detail);
}

// ---------------------------------------------------------------------------
// 7: expanding a repeated block (block length >= window - 1, which also
// keeps the window under twice the block) never changes the shingle set,
// and the expanded document classifies as a duplicate of the short one.

void criterion_7() {
    Rng rng(707);
    std::size_t set_violations = 0, verdict_violations = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t rlen = 2 + rng.below(11);
        const std::uint32_t k = 1 + std::uint32_t(rng.below(rlen + 1));  // k <= |R|+1 < 2|R|
        const std::size_t n = 2 + rng.below(5);

        DomSequence d1, d2;
        auto append_tok = [](DomSequence& s, const std::string& t) { s.elements.push_back(t); };
        const std::size_t alen = rng.below(9), blen = rng.below(9);
        for (std::size_t i = 0; i < alen; ++i) append_tok(d1, "a" + std::to_string(i));
        d2 = d1;
        for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t i = 0; i < rlen; ++i) append_tok(d1, "r" + std::to_string(i));
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t i = 0; i < rlen; ++i) append_tok(d2, "r" + std::to_string(i));
        for (std::size_t i = 0; i < blen; ++i) {
            append_tok(d1, "b" + std::to_string(i));
            append_tok(d2, "b" + std::to_string(i));
        }

        ShingleSet s1 = shingle(d1, ShingleParams{k});
        ShingleSet s2 = shingle(d2, ShingleParams{k});
        if (!(s1 == s2)) {
            ++set_violations;
            continue;
        }

        DedupConfig cfg;
        cfg.k = k;
        HashFamily family(cfg.ell, cfg.master_seed);
        std::vector<PreparedSketch> stream;
        stream.push_back({"short", sketch(s1, family), ""});
        stream.push_back({"long", sketch(s2, family), ""});
        DedupResult res = dedup_sketches(stream, cfg);
        if (res.verdicts[1].decision != Decision::Duplicate ||
            res.verdicts[1].duplicate_of != "short")
            ++verdict_violations;
    }
    char detail[128];
    std::snprintf(detail, sizeof detail, "200 cases: %zu set mismatches, %zu verdict misses",
                  set_violations, verdict_violations);
    report(7, "repeated-block expansion is invisible to the scan",
           set_violations == 0 && verdict_violations == 0, detail);
}

// ---------------------------------------------------------------------------
// 8: a chain of states, each similar to its neighbor but not to its
// neighbor's neighbor, dedups to ceil(m/2) uniques in one order and
// floor(m/2) in another — the stream is order-dependent by construction.

void criterion_8() {
    const std::uint32_t k = 12;
    const int m = 7;          // chain length
    const int doc_len = 211;  // tokens per document
    const int shift = 16;     // token offset between neighbors

    std::vector<DomSequence> docs(m);
    for (int i = 0; i < m; ++i) {
        docs[i].elements = {"html", "head", "body"};
        for (int t = 0; t < doc_len; ++t)
            docs[i].elements.push_back("c" + std::to_string(shift * i + t));
    }

    std::vector<ShingleSet> sets;
    for (const DomSequence& d : docs) sets.push_back(shingle(d, ShingleParams{k}));

    // The construction is only meaningful if neighbors land above the
    // threshold and second neighbors below it; verify with exact overlap.
    const double j1 = exact_jaccard(sets[0], sets[1]);
    const double j2 = exact_jaccard(sets[0], sets[2]);
    const double expect_j1 = 184.0 / 222.0, expect_j2 = 168.0 / 238.0;
    bool geometry_ok = true;
    for (int i = 0; i + 1 < m; ++i)
        geometry_ok &= std::abs(exact_jaccard(sets[i], sets[i + 1]) - expect_j1) < 1e-12;
    for (int i = 0; i + 2 < m; ++i)
        geometry_ok &= std::abs(exact_jaccard(sets[i], sets[i + 2]) - expect_j2) < 1e-12;

    DedupConfig cfg{k, 2000, 0.77, 1};
    HashFamily family(cfg.ell, cfg.master_seed);
    auto unique_count = [&](const std::vector<int>& order) {
        std::vector<PreparedSketch> stream;
        for (int i : order)
            stream.push_back({"s" + std::to_string(i + 1), sketch(sets[i], family), ""});
        DedupResult res = dedup_sketches(stream, cfg);
        std::size_t uniques = 0;
        for (const Verdict& v : res.verdicts)
            if (v.decision == Decision::NewState) ++uniques;
        return uniques;
    };

    const std::size_t forward = unique_count({0, 1, 2, 3, 4, 5, 6});
    const std::size_t alternate = unique_count({1, 3, 5, 0, 2, 4, 6});

    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "J(adjacent)=%.4f J(two apart)=%.4f; forward order -> %zu uniques, "
                  "alternate -> %zu",
                  j1, j2, forward, alternate);
    report(8, "chain scan yields ceil(m/2) or floor(m/2) uniques by order",
           geometry_ok && forward == 4 && alternate == 3, detail);
}

// ---------------------------------------------------------------------------
// 9: the default synthetic corpus — first validated pairwise by exact
// overlap, then scanned — must come out with near-perfect quality, and the
// whole-sequence baseline must fragment it at least 5x worse.

void criterion_9() {
    GeneratedCorpus corpus = generate_corpus(GeneratorSpec{}, 1);
    const std::size_t docs = corpus.documents.size();

    std::vector<ShingleSet> sets(docs);
    std::vector<std::string> labels(docs);
    for (std::size_t i = 0; i < docs; ++i) {
        sets[i] = shingle(serialize(parse_html(corpus.documents[i])), ShingleParams{12});
        labels[i] = *corpus.documents[i].label;
    }
    double worst_intra = 1.0, worst_inter = 0.0;
    for (std::size_t i = 0; i < docs; ++i) {
        for (std::size_t j = i + 1; j < docs; ++j) {
            const double jac = exact_jaccard(sets[i], sets[j]);
            if (labels[i] == labels[j])
                worst_intra = std::min(worst_intra, jac);
            else
                worst_inter = std::max(worst_inter, jac);
        }
    }
    const bool corpus_ok = worst_intra >= 0.9 && worst_inter <= 0.4;

    RunConfig cfg;
    cfg.deterministic = true;
    RunOutput mh = run_dedup_docs(cfg, corpus.documents, corpus.truth);
    RunConfig scfg = cfg;
    scfg.strategy = Strategy::SimpleHash;
    RunOutput sh = run_dedup_docs(scfg, corpus.documents, corpus.truth);

    const auto mh_unique = mh.report["results"]["unique_states"].get<std::size_t>();
    const auto sh_unique = sh.report["results"]["unique_states"].get<std::size_t>();
    const double eff = mh.metrics->efficiency;
    const double cov = mh.metrics->coverage;

    const bool pass = corpus_ok && mh_unique >= 20 && mh_unique <= 24 && eff >= 0.8 &&
                      cov >= 0.95 && sh_unique >= 5 * mh_unique;
    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "intra J >= %.3f, inter J <= %.3f; scan: %zu uniques, efficiency %.3f, "
                  "coverage %.3f; baseline %zu uniques",
                  worst_intra, worst_inter, mh_unique, eff, cov, sh_unique);
    report(9, "default 20x25 corpus dedups within [20,24] at high quality", pass, detail);
}

// ---------------------------------------------------------------------------
// 10: two deterministic runs over the same corpus produce identical bytes.

void criterion_10() {
    const fs::path dir = fs::temp_directory_path() / "statedup_accept_det";
    fs::remove_all(dir);
    GeneratorSpec spec;
    spec.templates = 8;
    spec.variants_per_template = 6;
    GeneratedCorpus corpus = generate_corpus(spec, 10);
    write_corpus_dir(dir / "corpus", corpus);

    auto run_once = [&](const fs::path& out) {
        RunConfig cfg;
        cfg.input = (dir / "corpus").string();
        cfg.truth_path = (dir / "corpus" / "truth.tsv").string();
        cfg.report_path = out.string();
        cfg.deterministic = true;
        return run_dedup(cfg);
    };
    RunOutput a = run_once(dir / "a.json");
    RunOutput b = run_once(dir / "b.json");

    auto slurp = [](const fs::path& p) {
        std::string out;
        std::FILE* f = std::fopen(p.string().c_str(), "rb");
        if (!f) return out;
        char buf[4096];
        std::size_t got;
        while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
        std::fclose(f);
        return out;
    };
    const bool json_equal = slurp(dir / "a.json") == slurp(dir / "b.json") &&
                            !slurp(dir / "a.json").empty();
    const bool csv_equal = slurp(dir / "a.csv") == slurp(dir / "b.csv");
    const bool mem_equal = a.report.dump(2) == b.report.dump(2);
    fs::remove_all(dir);

    char detail[128];
    std::snprintf(detail, sizeof detail, "report files %s, csv %s, in-memory %s",
                  json_equal ? "identical" : "DIFFER", csv_equal ? "identical" : "DIFFER",
                  mem_equal ? "identical" : "DIFFER");
    report(10, "deterministic runs are byte-identical", json_equal && csv_equal && mem_equal,
           detail);
}

// ---------------------------------------------------------------------------
// 11: the one-pass scan has to stay fast — a floor, not a benchmark.

void criterion_11() {
    GeneratedCorpus corpus = generate_corpus(GeneratorSpec{}, 2);
    const auto start = std::chrono::steady_clock::now();
    DedupResult res = dedup_stream(corpus.documents, DedupConfig{});
    const auto end = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(end - start).count();
    const double rate = double(corpus.documents.size()) / secs;

    std::size_t uniques = 0;
    for (const Verdict& v : res.verdicts)
        if (v.decision == Decision::NewState) ++uniques;

    char detail[128];
    std::snprintf(detail, sizeof detail, "%zu docs in %.3fs = %.0f docs/s (%zu uniques)",
                  corpus.documents.size(), secs, rate, uniques);
    report(11, "single-worker scan sustains 200 documents per second", rate >= 200.0, detail);
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path data_dir = argc > 1 ? fs::path(argv[1]) : fs::path("data");

    criteria_1_and_3();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5(data_dir);
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();

    if (g_failures == 0) {
        std::printf("all 11 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
