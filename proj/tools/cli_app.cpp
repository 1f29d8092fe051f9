#include "cli_app.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "statedup/corpus_io.hpp"
#include "statedup/dom.hpp"
#include "statedup/errors.hpp"
#include "statedup/minhash.hpp"
#include "statedup/shingle.hpp"

namespace statedup::cli {
namespace {

namespace fs = std::filesystem;

// A literal "none" disables filtering; otherwise the values are the excluded
// tag names.  Serialized sequences are lowercase, so lowercase here too.
std::optional<std::vector<std::string>> resolve_exclude(const std::vector<std::string>& raw,
                                                        bool given) {
    if (!given) return std::nullopt;
    if (raw.size() == 1 && raw[0] == "none") return std::vector<std::string>{};
    std::vector<std::string> tags = raw;
    for (std::string& t : tags)
        for (char& c : t)
            if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    return tags;
}

void add_sketch_options(CLI::App* sub, DedupConfig& dedup) {
    sub->add_option("-k,--k,--shingle-k", dedup.k, "Shingle window width in tags")
        ->capture_default_str()
        ->envname("STATEDUP_K");
    sub->add_option("--hashes", dedup.ell, "Hash functions per sketch")
        ->capture_default_str()
        ->envname("STATEDUP_HASHES");
    sub->add_option("--tau", dedup.tau, "Similarity threshold in (0,1]")
        ->capture_default_str()
        ->envname("STATEDUP_TAU");
    sub->add_option("--seed", dedup.master_seed, "Master seed for the hash family")
        ->capture_default_str()
        ->envname("STATEDUP_SEED");
}

void add_exclude_option(CLI::App* sub, TagListOption& b) {
    b.opt = sub->add_option("--exclude-tags", b.values,
                            "Tags dropped from the element sequence (default: script style "
                            "noscript meta link br wbr); pass 'none' to keep everything")
                ->delimiter(',')
                ->envname("STATEDUP_EXCLUDE_TAGS");
}

void add_input_options(CLI::App* sub, RunConfig& run, std::string& format_str) {
    sub->add_option("input", run.input, "Corpus directory or .jsonl record file")->required();
    sub->add_option("--format", format_str, "Input layout")
        ->transform(CLI::IsMember({"dir", "jsonl"}, CLI::ignore_case))
        ->capture_default_str()
        ->envname("STATEDUP_FORMAT");
    sub->add_option("--truth", run.truth_path,
                    "id<TAB>label ground-truth file (overrides inline labels)")
        ->envname("STATEDUP_TRUTH");
}

InputFormat to_format(std::string_view s) {
    return s == "jsonl" ? InputFormat::Jsonl : InputFormat::Directory;
}

std::string summary_line(const RunOutput& out) {
    const auto& rep = out.report;
    std::ostringstream os;
    os << "documents=" << rep["corpus"]["documents"].get<std::uint64_t>()
       << " unique=" << rep["results"]["unique_states"].get<std::uint64_t>()
       << " duplicates=" << rep["results"]["duplicates"].get<std::uint64_t>()
       << " failed=" << rep["corpus"]["failed"].get<std::uint64_t>();
    if (out.metrics) {
        os << " efficiency=" << out.metrics->efficiency << " coverage=" << out.metrics->coverage;
    }
    return os.str();
}

int run_gen(const GenOptions& opt) {
    GeneratedCorpus corpus = generate_corpus(opt.spec, opt.seed);
    if (!opt.out_dir.empty()) {
        write_corpus_dir(opt.out_dir, corpus);
        std::cout << "wrote " << corpus.documents.size() << " documents to " << opt.out_dir
                  << " (+ truth.tsv)\n";
    }
    if (!opt.out_jsonl.empty()) {
        write_corpus_jsonl(opt.out_jsonl, corpus.documents);
        std::cout << "wrote " << corpus.documents.size() << " records to " << opt.out_jsonl
                  << "\n";
    }
    return 0;
}

int run_inspect(const InspectOptions& opt) {
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) throw IoError("cannot open " + opt.input);
    std::ostringstream buf;
    buf << in.rdbuf();

    HtmlDocument doc{fs::path(opt.input).stem().string(), buf.str(), std::nullopt};
    DomTree tree = parse_html(doc);

    ElementFilter filter = ElementFilter::standard();
    if (opt.exclude_tags) {
        filter = ElementFilter{};
        for (const std::string& t : *opt.exclude_tags) filter.excluded_tags.insert(t);
    }

    DomSequence seq = serialize(tree, filter);
    ShingleParams params{opt.dedup.k};
    ShingleSet set = shingle(seq, params);
    HashFamily family(opt.dedup.ell, opt.dedup.master_seed);
    MinHashSketch sk = sketch(set, family);

    nlohmann::ordered_json j;
    j["id"] = doc.id;
    j["tokens"] = seq.elements;
    j["token_count"] = seq.length();
    j["shingle_count"] = set.fingerprints.size();
    if (opt.dump_shingles) j["windows"] = shingle_windows(seq, params);
    nlohmann::ordered_json head = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < sk.mins.size() && i < 8; ++i) head.push_back(sk.mins[i]);
    j["sketch_head"] = std::move(head);
    j["sketch_hashes"] = sk.size();
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

void build_cli(CLI::App& app, CliState& state) {
    app.description("Near-duplicate page-state detection over DOM element sequences");
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a TOML/INI file");

    // --- dedup ------------------------------------------------------------
    auto* dedup = app.add_subcommand("dedup", "One-pass duplicate scan over a corpus");
    add_input_options(dedup, state.run, state.format_str);
    add_sketch_options(dedup, state.run.dedup);
    add_exclude_option(dedup, state.dedup_tags);
    dedup->add_option("--strategy", state.strategy_str,
                      "minhash (near-duplicate) or simplehash (exact-sequence)")
        ->transform(CLI::IsMember({"minhash", "simplehash"}, CLI::ignore_case))
        ->capture_default_str()
        ->envname("STATEDUP_STRATEGY");
    dedup->add_option("--report", state.run.report_path,
                      "Write a JSON report here (a .csv lands next to it)")
        ->envname("STATEDUP_REPORT");
    dedup->add_option("--load-index", state.run.load_index_path,
                      "Resume from a saved index directory (same parameters required)");
    dedup->add_option("--save-index", state.run.save_index_path,
                      "Write the post-scan index to this directory");
    dedup->add_flag("--dump-shingles", state.run.dump_shingles,
                    "Embed every document's shingle windows in the report");
    dedup->add_flag("--deterministic", state.run.deterministic,
                    "Omit timing fields so equal inputs give byte-identical reports");
    dedup->add_option("--max-bucket-warn", state.run.max_bucket_warn,
                      "Warn when an index bucket exceeds this size (0 disables)")
        ->capture_default_str();
    dedup->add_option("--workers", state.run.workers, "Threads for parsing and sketching")
        ->capture_default_str()
        ->envname("STATEDUP_WORKERS");
    dedup->callback([&state] {
        state.parsed = "dedup";
        state.run.format = to_format(state.format_str);
        state.run.strategy =
            state.strategy_str == "simplehash" ? Strategy::SimpleHash : Strategy::MinHash;
        state.run.exclude_tags =
            resolve_exclude(state.dedup_tags.values, state.dedup_tags.opt->count() > 0);
    });

    // --- sweep ------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Quality table over a parameter grid");
    add_input_options(sweep_cmd, state.run, state.format_str);
    add_exclude_option(sweep_cmd, state.sweep_tags);
    sweep_cmd->add_option("--grid-k", state.grid.ks, "Shingle widths to try")
        ->delimiter(',')
        ->required();
    sweep_cmd->add_option("--grid-hashes", state.grid.ells, "Sketch sizes to try")
        ->delimiter(',')
        ->required();
    sweep_cmd->add_option("--grid-tau", state.grid.taus, "Thresholds to try")
        ->delimiter(',')
        ->required();
    sweep_cmd->add_option("--seed", state.run.dedup.master_seed, "Master seed for the hash family")
        ->capture_default_str()
        ->envname("STATEDUP_SEED");
    sweep_cmd->add_option("--report", state.run.report_path, "Write the table as JSON here");
    sweep_cmd->add_option("--workers", state.run.workers, "Threads for parsing and sketching")
        ->capture_default_str()
        ->envname("STATEDUP_WORKERS");
    sweep_cmd->callback([&state] {
        state.parsed = "sweep";
        state.run.format = to_format(state.format_str);
        state.run.exclude_tags =
            resolve_exclude(state.sweep_tags.values, state.sweep_tags.opt->count() > 0);
    });

    // --- gen --------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a labeled synthetic corpus");
    auto* out_group = gen->add_option_group("output", "Where the corpus lands");
    out_group->add_option("--out", state.gen.out_dir, "Directory for .html files + truth.tsv");
    out_group->add_option("--jsonl", state.gen.out_jsonl, "Single .jsonl record file");
    out_group->require_option(1, 2);
    gen->add_option("--templates", state.gen.spec.templates, "Distinct page states")
        ->capture_default_str();
    gen->add_option("--variants", state.gen.spec.variants_per_template, "Near-duplicates per state")
        ->capture_default_str();
    gen->add_option("--edit-rate", state.gen.spec.element_edit_rate,
                    "Element edits per variant as a fraction of template tokens")
        ->capture_default_str();
    gen->add_flag("--text-noise,!--no-text-noise", state.gen.spec.text_noise,
                  "Re-randomize visible text per variant")
        ->capture_default_str();
    gen->add_flag("--shuffle", state.gen.spec.component_shuffle,
                  "Permute top-level page blocks per variant");
    gen->add_flag("--repeat", state.gen.spec.repeat_expansion,
                  "Vary the repetition count of a uniform list per variant");
    gen->add_flag("--popup", state.gen.spec.popup_injection,
                  "Append a fixed overlay to some variants");
    gen->add_option("--min-tokens", state.gen.spec.min_tokens, "Template size floor (tags)")
        ->capture_default_str();
    gen->add_option("--max-tokens", state.gen.spec.max_tokens, "Template size ceiling (tags)")
        ->capture_default_str();
    gen->add_option("--seed", state.gen.seed, "Generator seed")
        ->capture_default_str()
        ->envname("STATEDUP_SEED");
    gen->callback([&state] { state.parsed = "gen"; });

    // --- inspect ----------------------------------------------------------
    auto* inspect = app.add_subcommand("inspect", "Tokenize and sketch a single page");
    inspect->add_option("input", state.inspect.input, "One .html file")->required();
    add_sketch_options(inspect, state.inspect.dedup);
    add_exclude_option(inspect, state.inspect_tags);
    inspect->add_flag("--windows", state.inspect.dump_shingles,
                      "Include the full shingle window list");
    inspect->callback([&state] {
        state.parsed = "inspect";
        state.inspect.exclude_tags =
            resolve_exclude(state.inspect_tags.values, state.inspect_tags.opt->count() > 0);
    });
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"statedup"};
    CliState state;
    build_cli(app, state);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (state.parsed == "dedup") {
            RunOutput out = run_dedup(state.run);
            if (state.run.report_path.empty()) {
                std::cout << out.report.dump(2) << "\n";
            } else {
                std::cout << summary_line(out) << " -> " << state.run.report_path << "\n";
            }
            return out.exit_code;
        }
        if (state.parsed == "sweep") {
            nlohmann::ordered_json table = sweep(state.run, state.grid);
            std::cout << table.dump(2) << "\n";
            return 0;
        }
        if (state.parsed == "gen") return run_gen(state.gen);
        if (state.parsed == "inspect") return run_inspect(state.inspect);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace statedup::cli
