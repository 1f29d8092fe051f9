#include "statedup/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "statedup/errors.hpp"

namespace statedup {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path.string());
    return std::move(buf).str();
}

std::string lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

}  // namespace

std::vector<HtmlDocument> load_corpus_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = lower(entry.path().extension().string());
        if (ext == ".html" || ext == ".htm") files.push_back(entry.path());
    }
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

    std::vector<HtmlDocument> docs;
    docs.reserve(files.size());
    std::unordered_set<std::string> seen;
    for (const auto& path : files) {
        std::string id = path.stem().string();
        if (!seen.insert(id).second)
            throw DuplicateIdError("duplicate state id in corpus: '" + id + "'");
        docs.push_back(HtmlDocument{std::move(id), read_file(path), std::nullopt});
    }
    return docs;
}

std::vector<HtmlDocument> load_corpus_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<HtmlDocument> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
            !rec.contains("html") || !rec["html"].is_string())
            throw FormatError(file.string() + ":" + std::to_string(lineno) +
                              ": record needs string fields 'id' and 'html'");
        HtmlDocument doc;
        doc.id = rec["id"].get<std::string>();
        if (doc.id.empty())
            throw FormatError(file.string() + ":" + std::to_string(lineno) + ": empty id");
        doc.raw = rec["html"].get<std::string>();
        if (rec.contains("label") && rec["label"].is_string())
            doc.label = rec["label"].get<std::string>();
        if (!seen.insert(doc.id).second)
            throw DuplicateIdError("duplicate state id in corpus: '" + doc.id + "'");
        docs.push_back(std::move(doc));
    }
    return docs;
}

GroundTruth load_truth_tsv(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    GroundTruth truth;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw FormatError(file.string() + ":" + std::to_string(lineno) +
                              ": expected 'id<TAB>label'");
        std::string id = line.substr(0, tab);
        if (!truth.labels.emplace(std::move(id), line.substr(tab + 1)).second)
            throw DuplicateIdError(file.string() + ":" + std::to_string(lineno) +
                                   ": duplicate id '" + line.substr(0, tab) + "'");
    }
    return truth;
}

GroundTruth truth_from_documents(std::span<const HtmlDocument> docs) {
    GroundTruth truth;
    for (const HtmlDocument& doc : docs)
        if (doc.label) truth.labels.emplace(doc.id, *doc.label);
    return truth;
}

void write_corpus_dir(const std::filesystem::path& dir, const GeneratedCorpus& corpus) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const HtmlDocument& doc : corpus.documents) {
        if (doc.id.find('/') != std::string::npos || doc.id.find('\\') != std::string::npos)
            throw IoError("state id is not a safe filename: '" + doc.id + "'");
        std::ofstream out(dir / (doc.id + ".html"), std::ios::binary);
        out << doc.raw;
        if (!out) throw IoError("failed to write " + (dir / (doc.id + ".html")).string());
    }
    std::vector<const HtmlDocument*> labeled;
    for (const HtmlDocument& doc : corpus.documents)
        if (doc.label) labeled.push_back(&doc);
    if (labeled.empty()) return;
    std::ofstream out(dir / "truth.tsv");
    for (const HtmlDocument* doc : labeled) out << doc->id << '\t' << *doc->label << '\n';
    if (!out) throw IoError("failed to write " + (dir / "truth.tsv").string());
}

void write_corpus_jsonl(const std::filesystem::path& file, std::span<const HtmlDocument> docs) {
    if (file.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    for (const HtmlDocument& doc : docs) {
        nlohmann::ordered_json rec;
        rec["id"] = doc.id;
        rec["html"] = doc.raw;
        if (doc.label) rec["label"] = *doc.label;
        out << rec.dump() << '\n';
    }
    if (!out) throw IoError("failed to write " + file.string());
}

}  // namespace statedup
