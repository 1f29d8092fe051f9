#pragma once

#include <string>

#include <CLI11.hpp>

#include "statedup/corpus_gen.hpp"
#include "statedup/runner.hpp"

// CLI wiring, split from main() so tests can drive argument parsing.

namespace statedup::cli {

struct GenOptions {
    GeneratorSpec spec;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string out_jsonl;
};

struct InspectOptions {
    std::string input;
    DedupConfig dedup;
    std::optional<std::vector<std::string>> exclude_tags;
    bool dump_shingles = false;
};

// An --exclude-tags binding; `opt` lets the parse callback see whether the
// flag was given at all (unset means "standard filter").
struct TagListOption {
    std::vector<std::string> values;
    CLI::Option* opt = nullptr;
};

// All subcommand states; `parsed` names the one that ran.  The enum-valued
// options are parsed as checked strings and mapped in the parse callbacks.
struct CliState {
    RunConfig run;
    SweepGrid grid;
    GenOptions gen;
    InspectOptions inspect;
    TagListOption dedup_tags;
    TagListOption sweep_tags;
    TagListOption inspect_tags;
    std::string format_str = "dir";
    std::string strategy_str = "minhash";
    std::string parsed;
};

// Builds the full command tree on `app`, binding options to `state`.
// Returned subcommand pointers stay owned by `app`.
void build_cli(CLI::App& app, CliState& state);

// Parse + dispatch.  Returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace statedup::cli
