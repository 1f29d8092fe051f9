#include "statedup/runner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <unordered_map>

#include "statedup/corpus_io.hpp"
#include "statedup/errors.hpp"
#include "statedup/shingle.hpp"

namespace statedup {

std::string_view to_string(InputFormat f) {
    return f == InputFormat::Directory ? "dir" : "jsonl";
}

std::string_view to_string(Strategy s) {
    return s == Strategy::MinHash ? "minhash" : "simplehash";
}

ElementFilter RunConfig::filter() const {
    if (!exclude_tags) return ElementFilter::standard();
    ElementFilter f;
    for (const std::string& t : *exclude_tags) f.excluded_tags.insert(t);
    return f;
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string verdicts_csv(std::span<const Verdict> verdicts) {
    std::string csv = "id,decision,duplicate_of,score,similarity,candidates_examined,error\n";
    char sim[32];
    for (const Verdict& v : verdicts) {
        std::snprintf(sim, sizeof sim, "%.6f", v.similarity);
        csv += csv_escape(v.probe_id);
        csv += ',';
        csv += to_string(v.decision);
        csv += ',';
        csv += csv_escape(v.duplicate_of);
        csv += ',';
        csv += std::to_string(v.score);
        csv += ',';
        csv += sim;
        csv += ',';
        csv += std::to_string(v.candidates_examined);
        csv += ',';
        csv += csv_escape(v.error);
        csv += '\n';
    }
    return csv;
}

nlohmann::ordered_json config_echo(const RunConfig& cfg) {
    std::vector<std::string> excluded;
    for (const std::string& t : cfg.filter().excluded_tags) excluded.push_back(t);
    std::sort(excluded.begin(), excluded.end());
    return nlohmann::ordered_json{
        {"input", cfg.input},
        {"format", std::string(to_string(cfg.format))},
        {"strategy", std::string(to_string(cfg.strategy))},
        {"k", cfg.dedup.k},
        {"hashes", cfg.dedup.ell},
        {"tau", cfg.dedup.tau},
        {"seed", cfg.dedup.master_seed},
        {"exclude_tags", excluded},
        {"truth", cfg.truth_path},
        {"workers", cfg.workers},
        {"max_bucket_warn", cfg.max_bucket_warn},
        {"dump_shingles", cfg.dump_shingles},
        {"deterministic", cfg.deterministic},
    };
}

nlohmann::ordered_json metrics_json(const ScanMetrics& m,
                                    std::span<const Verdict> verdicts,
                                    const GroundTruth& truth) {
    nlohmann::ordered_json j{
        {"reported_unique", m.reported_unique},
        {"truly_unique_found", m.truly_unique_found},
        {"false_merges", m.false_merges},
        {"false_splits", m.false_splits},
        {"efficiency", m.efficiency},
        {"coverage", m.coverage},
        {"true_state_count", truth.true_state_count()},
    };
    if (m.efficiency_degenerate) j["efficiency_degenerate"] = true;
    nlohmann::ordered_json detail = nlohmann::ordered_json::array();
    for (const MergedLabel& ml : merge_detail(verdicts, truth)) {
        nlohmann::ordered_json docs = nlohmann::ordered_json::array();
        for (const auto& [id, into] : ml.documents)
            docs.push_back({{"id", id}, {"merged_into", into}});
        detail.push_back({{"label", ml.label}, {"documents", docs}});
    }
    j["merged_labels"] = detail;
    return j;
}

// Exact-equality baseline: first document with a given whole-sequence hash
// wins, everything after it is a duplicate of that first sighting.
std::vector<Verdict> simplehash_stream(std::span<const HtmlDocument> docs,
                                       const RunConfig& cfg) {
    const ElementFilter filter = cfg.filter();
    std::vector<Verdict> verdicts;
    verdicts.reserve(docs.size());
    std::unordered_map<std::uint64_t, std::string> first_seen;
    for (const HtmlDocument& doc : docs) {
        Verdict v;
        v.probe_id = doc.id;
        try {
            DomSequence seq = serialize(parse_html(doc), filter);
            const std::uint64_t h = sequence_hash(seq);
            auto [it, inserted] = first_seen.try_emplace(h, doc.id);
            if (inserted) {
                v.decision = Decision::NewState;
            } else {
                v.decision = Decision::Duplicate;
                v.duplicate_of = it->second;
                v.score = cfg.dedup.ell;  // exact match
                v.similarity = 1.0;
                v.candidates_examined = 1;
            }
        } catch (const Error& e) {
            v.decision = Decision::Failed;
            v.error = e.what();
        }
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

}  // namespace

RunOutput run_dedup_docs(const RunConfig& cfg, std::span<const HtmlDocument> docs,
                         const GroundTruth& truth) {
    RunOutput out;
    std::vector<std::string> warnings;

    if (cfg.strategy != Strategy::MinHash &&
        (!cfg.load_index_path.empty() || !cfg.save_index_path.empty()))
        throw InvalidParamError("index persistence requires the minhash strategy");

    const auto start = std::chrono::steady_clock::now();
    std::optional<LshIndex> index;
    std::uint32_t preloaded = 0;
    if (cfg.strategy == Strategy::MinHash) {
        DedupResult result = [&] {
            if (cfg.load_index_path.empty())
                return dedup_stream(docs, cfg.dedup, cfg.filter(), cfg.workers);
            LshIndex loaded = LshIndex::load(cfg.load_index_path);
            const DedupConfig& got = loaded.config();
            if (got.k != cfg.dedup.k || got.ell != cfg.dedup.ell || got.tau != cfg.dedup.tau ||
                got.master_seed != cfg.dedup.master_seed)
                throw InvalidParamError(
                    "saved index was built with k=" + std::to_string(got.k) +
                    " hashes=" + std::to_string(got.ell) + " tau=" + std::to_string(got.tau) +
                    " seed=" + std::to_string(got.master_seed) +
                    "; rerun with matching parameters");
            preloaded = loaded.registered();
            std::vector<PreparedSketch> prepared =
                prepare_sketches(docs, cfg.dedup, cfg.filter(), cfg.workers);
            return dedup_sketches(prepared, std::move(loaded));
        }();
        out.verdicts = std::move(result.verdicts);
        index.emplace(std::move(result.index));
    } else {
        out.verdicts = simplehash_stream(docs, cfg);
    }
    if (index && !cfg.save_index_path.empty()) index->save(cfg.save_index_path);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    const double seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();

    std::size_t unique = 0, duplicates = 0, failures = 0;
    std::vector<std::string> unique_ids;
    for (const Verdict& v : out.verdicts) {
        switch (v.decision) {
            case Decision::NewState: ++unique; unique_ids.push_back(v.probe_id); break;
            case Decision::Duplicate: ++duplicates; break;
            case Decision::Failed: ++failures; break;
        }
    }

    if (index && cfg.max_bucket_warn > 0) {
        const std::size_t max_bucket = index->max_bucket_size();
        if (max_bucket > cfg.max_bucket_warn)
            warnings.push_back("largest bucket holds " + std::to_string(max_bucket) +
                               " states (threshold " + std::to_string(cfg.max_bucket_warn) +
                               "); near-identical corpus or too-small k can degrade probes");
    }

    nlohmann::ordered_json report;
    report["tool"] = "statedup";
    report["report_version"] = 1;
    if (!cfg.deterministic) report["generated_at"] = utc_timestamp();
    report["config"] = config_echo(cfg);
    report["corpus"] = {{"documents", docs.size()}, {"failed", failures}};
    report["results"] = {{"unique_states", unique}, {"duplicates", duplicates}};
    if (!cfg.load_index_path.empty() || !cfg.save_index_path.empty()) {
        nlohmann::ordered_json idx;
        if (!cfg.load_index_path.empty()) {
            idx["loaded_from"] = cfg.load_index_path;
            idx["preloaded_states"] = preloaded;
        }
        if (!cfg.save_index_path.empty()) {
            idx["saved_to"] = cfg.save_index_path;
            idx["registered_states"] = index->registered();
        }
        report["index"] = std::move(idx);
    }
    if (!cfg.deterministic) {
        report["timing"] = {{"elapsed_seconds", seconds},
                            {"docs_per_second", seconds > 0 ? docs.size() / seconds : 0.0}};
    }
    report["warnings"] = warnings;
    report["unique_states"] = unique_ids;

    std::optional<std::unordered_map<std::string, std::vector<std::string>>> windows;
    if (cfg.dump_shingles) {
        windows.emplace();
        const ElementFilter filter = cfg.filter();
        for (const HtmlDocument& doc : docs) {
            try {
                DomSequence seq = serialize(parse_html(doc), filter);
                (*windows)[doc.id] = shingle_windows(seq, ShingleParams{cfg.dedup.k});
            } catch (const Error&) {
                // Already surfaced as a Failed verdict.
            }
        }
    }

    nlohmann::ordered_json verdicts_json = nlohmann::ordered_json::array();
    for (const Verdict& v : out.verdicts) {
        nlohmann::ordered_json vj{
            {"id", v.probe_id},
            {"decision", std::string(to_string(v.decision))},
            {"score", v.score},
            {"similarity", v.similarity},
            {"candidates_examined", v.candidates_examined},
        };
        if (v.decision == Decision::Duplicate) vj["duplicate_of"] = v.duplicate_of;
        if (v.decision == Decision::Failed) vj["error"] = v.error;
        if (windows) {
            auto it = windows->find(v.probe_id);
            if (it != windows->end()) vj["shingle_windows"] = it->second;
        }
        verdicts_json.push_back(std::move(vj));
    }
    report["verdicts"] = std::move(verdicts_json);

    if (!truth.empty()) {
        out.metrics = evaluate(out.verdicts, truth);
        report["metrics"] = metrics_json(*out.metrics, out.verdicts, truth);
    }

    out.report = std::move(report);
    out.report_csv = verdicts_csv(out.verdicts);
    out.exit_code = failures > 0 ? 2 : 0;

    if (!cfg.report_path.empty()) {
        std::filesystem::path json_path(cfg.report_path);
        if (json_path.has_parent_path()) {
            std::error_code ec;
            std::filesystem::create_directories(json_path.parent_path(), ec);
        }
        std::ofstream json_out(json_path, std::ios::binary);
        json_out << out.report.dump(2) << '\n';
        if (!json_out) throw IoError("failed to write " + json_path.string());
        std::filesystem::path csv_path = json_path;
        csv_path.replace_extension(".csv");
        std::ofstream csv_out(csv_path, std::ios::binary);
        csv_out << out.report_csv;
        if (!csv_out) throw IoError("failed to write " + csv_path.string());
    }
    return out;
}

namespace {

std::pair<std::vector<HtmlDocument>, GroundTruth> load_inputs(const RunConfig& cfg) {
    if (cfg.input.empty()) throw InvalidParamError("no input corpus given");
    std::vector<HtmlDocument> docs = cfg.format == InputFormat::Directory
                                         ? load_corpus_dir(cfg.input)
                                         : load_corpus_jsonl(cfg.input);
    GroundTruth truth;
    if (!cfg.truth_path.empty()) truth = load_truth_tsv(cfg.truth_path);
    else truth = truth_from_documents(docs);
    return {std::move(docs), std::move(truth)};
}

}  // namespace

RunOutput run_dedup(const RunConfig& cfg) {
    auto [docs, truth] = load_inputs(cfg);
    return run_dedup_docs(cfg, docs, truth);
}

nlohmann::ordered_json sweep(const RunConfig& cfg, const SweepGrid& grid) {
    if (grid.ks.empty() || grid.ells.empty() || grid.taus.empty())
        throw InvalidParamError("sweep grid must have at least one value per axis");
    auto [docs, truth] = load_inputs(cfg);
    if (truth.empty())
        throw InvalidParamError("sweep needs ground truth (labels or a truth file)");

    const ElementFilter filter = cfg.filter();

    // Parse once; everything downstream is cached per axis.
    std::vector<std::optional<DomSequence>> sequences(docs.size());
    std::vector<std::string> errors(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        try {
            sequences[i] = serialize(parse_html(docs[i]), filter);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    }

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::uint32_t k : grid.ks) {
        std::vector<std::optional<ShingleSet>> sets(docs.size());
        for (std::size_t i = 0; i < docs.size(); ++i)
            if (sequences[i]) sets[i] = shingle(*sequences[i], ShingleParams{k});
        for (std::uint32_t ell : grid.ells) {
            const HashFamily family(ell, cfg.dedup.master_seed);
            std::vector<PreparedSketch> prepared(docs.size());
            for (std::size_t i = 0; i < docs.size(); ++i) {
                prepared[i].id = docs[i].id;
                if (sets[i]) prepared[i].sketch = sketch(*sets[i], family);
                else prepared[i].error = errors[i];
            }
            for (double tau : grid.taus) {
                DedupConfig cell{k, ell, tau, cfg.dedup.master_seed};
                DedupResult result = dedup_sketches(prepared, cell);
                ScanMetrics m = evaluate(result.verdicts, truth);
                rows.push_back(nlohmann::ordered_json{
                    {"k", k},
                    {"hashes", ell},
                    {"tau", tau},
                    {"unique_states", m.reported_unique},
                    {"truly_unique_found", m.truly_unique_found},
                    {"false_merges", m.false_merges},
                    {"false_splits", m.false_splits},
                    {"efficiency", m.efficiency},
                    {"coverage", m.coverage},
                });
            }
        }
    }

    nlohmann::ordered_json table;
    table["tool"] = "statedup";
    table["report_version"] = 1;
    if (!cfg.deterministic) table["generated_at"] = utc_timestamp();
    table["config"] = config_echo(cfg);
    table["corpus"] = {{"documents", docs.size()}};
    table["cells"] = std::move(rows);

    if (!cfg.report_path.empty()) {
        std::filesystem::path path(cfg.report_path);
        if (path.has_parent_path()) {
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
        }
        std::ofstream out(path, std::ios::binary);
        out << table.dump(2) << '\n';
        if (!out) throw IoError("failed to write " + path.string());
    }
    return table;
}

}  // namespace statedup
