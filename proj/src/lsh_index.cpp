#include "statedup/lsh_index.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "statedup/errors.hpp"
#include "statedup/shingle.hpp"

namespace statedup {

std::string_view to_string(Decision d) {
    switch (d) {
        case Decision::NewState: return "new_state";
        case Decision::Duplicate: return "duplicate";
        case Decision::Failed: return "failed";
    }
    return "unknown";
}

LshIndex::LshIndex(const DedupConfig& cfg)
    : cfg_(cfg), family_(cfg.ell, cfg.master_seed), tables_(cfg.ell) {
    if (cfg.k == 0) throw InvalidParamError("shingle width k must be positive");
    if (!(cfg.tau > 0.0) || cfg.tau > 1.0)
        throw InvalidParamError("tau must be in (0, 1]");
}

std::optional<std::uint32_t> LshIndex::ordinal_of(std::string_view id) const {
    auto it = ordinal_by_id_.find(std::string(id));
    if (it == ordinal_by_id_.end()) return std::nullopt;
    return it->second;
}

CandidateCounts LshIndex::probe(const MinHashSketch& sk) const {
    if (sk.size() != cfg_.ell)
        throw FamilyMismatchError("probe sketch has " + std::to_string(sk.size()) +
                                  " coordinates, index expects " + std::to_string(cfg_.ell));
    std::unordered_map<std::uint32_t, std::uint32_t> counts;
    for (std::uint32_t i = 0; i < cfg_.ell; ++i) {
        auto it = tables_[i].find(sk.mins[i]);
        if (it == tables_[i].end()) continue;
        for (std::uint32_t ordinal : it->second) ++counts[ordinal];
    }
    CandidateCounts out;
    out.entries.reserve(counts.size());
    for (const auto& [ordinal, agreements] : counts) out.entries.push_back({ordinal, agreements});
    std::sort(out.entries.begin(), out.entries.end(),
              [](const CandidateCount& a, const CandidateCount& b) { return a.ordinal < b.ordinal; });
    return out;
}

Verdict LshIndex::classify(std::string probe_id, const MinHashSketch& sk) const {
    CandidateCounts counts = probe(sk);
    Verdict v;
    v.probe_id = std::move(probe_id);
    v.candidates_examined = static_cast<std::uint32_t>(counts.entries.size());
    std::uint32_t best_ordinal = 0;
    std::uint32_t best_score = 0;
    // Entries are ordinal-ascending, so on equal scores the earliest
    // registered state wins.
    for (const CandidateCount& c : counts.entries) {
        if (c.agreements > best_score) {
            best_score = c.agreements;
            best_ordinal = c.ordinal;
        }
    }
    v.score = best_score;
    v.similarity = static_cast<double>(best_score) / static_cast<double>(cfg_.ell);
    if (v.similarity < cfg_.tau) {
        v.decision = Decision::NewState;
    } else {
        v.decision = Decision::Duplicate;
        v.duplicate_of = ids_[best_ordinal];
    }
    return v;
}

void LshIndex::insert(std::string id, MinHashSketch sk) {
    if (id.empty()) throw InvalidParamError("state id must not be empty");
    if (id.find('\n') != std::string::npos || id.find('\t') != std::string::npos)
        throw InvalidParamError("state id must not contain tabs or newlines: '" + id + "'");
    if (sk.size() != cfg_.ell)
        throw FamilyMismatchError("sketch has " + std::to_string(sk.size()) +
                                  " coordinates, index expects " + std::to_string(cfg_.ell));
    if (ordinal_by_id_.count(id))
        throw DuplicateIdError("state id already registered: '" + id + "'");
    const auto ordinal = static_cast<std::uint32_t>(ids_.size());
    for (std::uint32_t i = 0; i < cfg_.ell; ++i) tables_[i][sk.mins[i]].push_back(ordinal);
    ordinal_by_id_.emplace(id, ordinal);
    ids_.push_back(std::move(id));
    sketches_.push_back(std::move(sk));
}

std::size_t LshIndex::max_bucket_size() const {
    std::size_t max = 0;
    for (const auto& table : tables_)
        for (const auto& [value, bucket] : table) max = std::max(max, bucket.size());
    return max;
}

// ------------------------------------------------------------- persistence

namespace {
constexpr std::uint32_t kIndexFormatVersion = 1;
}

void LshIndex::save(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create index directory " + dir.string() + ": " + ec.message());

    nlohmann::ordered_json header;
    header["format_version"] = kIndexFormatVersion;
    header["family"] = std::string(HashFamily::kName);
    header["config"] = {
        {"k", cfg_.k}, {"hashes", cfg_.ell}, {"tau", cfg_.tau}, {"seed", cfg_.master_seed}};
    header["seeds"] = family_.seeds();
    header["states"] = ids_.size();
    {
        std::ofstream out(dir / "index.json");
        out << header.dump(2) << '\n';
        if (!out) throw IoError("failed to write " + (dir / "index.json").string());
    }
    {
        std::ofstream out(dir / "sketches.bin", std::ios::binary);
        for (const MinHashSketch& sk : sketches_) write_sketch(out, sk, family_);
        if (!out) throw IoError("failed to write " + (dir / "sketches.bin").string());
    }
    {
        std::ofstream out(dir / "states.tsv");
        for (const std::string& id : ids_) out << id << '\n';
        if (!out) throw IoError("failed to write " + (dir / "states.tsv").string());
    }
}

LshIndex LshIndex::load(const std::filesystem::path& dir) {
    std::ifstream header_in(dir / "index.json");
    if (!header_in) throw IoError("cannot open " + (dir / "index.json").string());
    nlohmann::json header;
    try {
        header_in >> header;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad index header: " + std::string(e.what()));
    }
    if (header.value("format_version", 0u) != kIndexFormatVersion)
        throw FormatError("unsupported index format version");
    if (header.value("family", "") != HashFamily::kName)
        throw FormatError("unsupported hash family '" + header.value("family", "") + "'");

    DedupConfig cfg;
    try {
        cfg.k = header.at("config").at("k").get<std::uint32_t>();
        cfg.ell = header.at("config").at("hashes").get<std::uint32_t>();
        cfg.tau = header.at("config").at("tau").get<double>();
        cfg.master_seed = header.at("config").at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad index config: " + std::string(e.what()));
    }
    LshIndex index(cfg);
    const auto stored_seeds = header.value("seeds", std::vector<std::uint64_t>{});
    if (stored_seeds != index.family_.seeds())
        throw FormatError("index seeds do not match the family derivation; "
                          "file may be corrupt or from a different build");

    const auto states = header.value("states", std::size_t{0});
    std::ifstream ids_in(dir / "states.tsv");
    if (!ids_in) throw IoError("cannot open " + (dir / "states.tsv").string());
    std::ifstream sk_in(dir / "sketches.bin", std::ios::binary);
    if (!sk_in) throw IoError("cannot open " + (dir / "sketches.bin").string());

    std::string id;
    std::size_t loaded = 0;
    while (std::getline(ids_in, id)) {
        if (id.empty()) continue;
        SketchRecord rec = read_sketch(sk_in);
        if (rec.ell != cfg.ell || rec.master_seed != cfg.master_seed)
            throw FormatError("sketch record does not match the index config");
        index.insert(id, std::move(rec.sketch));
        ++loaded;
    }
    if (loaded != states)
        throw FormatError("state count mismatch: header says " + std::to_string(states) +
                          ", found " + std::to_string(loaded));
    return index;
}

// ------------------------------------------------------------ streaming run

DedupResult dedup_sketches(std::span<const PreparedSketch> prepared, const DedupConfig& cfg) {
    return dedup_sketches(prepared, LshIndex(cfg));
}

DedupResult dedup_sketches(std::span<const PreparedSketch> prepared, LshIndex index) {
    DedupResult result{std::move(index), {}};
    result.verdicts.reserve(prepared.size());
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(prepared.size() + result.index.registered());
    for (std::uint32_t i = 0; i < result.index.registered(); ++i)
        seen_ids.insert(result.index.state_id(i));
    for (const PreparedSketch& p : prepared) {
        if (!seen_ids.insert(p.id).second) {
            Verdict v;
            v.probe_id = p.id;
            v.decision = Decision::Failed;
            v.error = "duplicate document id: " + p.id;
            result.verdicts.push_back(std::move(v));
            continue;
        }
        if (!p.sketch) {
            Verdict v;
            v.probe_id = p.id;
            v.decision = Decision::Failed;
            v.error = p.error;
            result.verdicts.push_back(std::move(v));
            continue;
        }
        try {
            Verdict v = result.index.classify(p.id, *p.sketch);
            if (v.decision == Decision::NewState) result.index.insert(p.id, *p.sketch);
            result.verdicts.push_back(std::move(v));
        } catch (const Error& e) {  // e.g. a repeated state id
            Verdict v;
            v.probe_id = p.id;
            v.decision = Decision::Failed;
            v.error = e.what();
            result.verdicts.push_back(std::move(v));
        }
    }
    return result;
}

std::vector<PreparedSketch> prepare_sketches(std::span<const HtmlDocument> docs,
                                             const DedupConfig& cfg,
                                             const ElementFilter& filter,
                                             unsigned workers) {
    const HashFamily family(cfg.ell, cfg.master_seed);
    const ShingleParams params{cfg.k};
    std::vector<PreparedSketch> prepared(docs.size());

    auto prepare_one = [&](std::size_t i) {
        prepared[i].id = docs[i].id;
        try {
            DomTree tree = parse_html(docs[i]);
            DomSequence seq = serialize(tree, filter);
            ShingleSet set = shingle(seq, params);
            prepared[i].sketch = sketch(set, family);
        } catch (const Error& e) {
            prepared[i].error = e.what();
        }
    };

    if (workers <= 1 || docs.size() < 2) {
        for (std::size_t i = 0; i < docs.size(); ++i) prepare_one(i);
        return prepared;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1))
            prepare_one(i);
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(docs.size()));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
    return prepared;
}

DedupResult dedup_stream(std::span<const HtmlDocument> docs, const DedupConfig& cfg,
                         const ElementFilter& filter, unsigned workers) {
    std::vector<PreparedSketch> prepared = prepare_sketches(docs, cfg, filter, workers);
    return dedup_sketches(prepared, cfg);
}

}  // namespace statedup
