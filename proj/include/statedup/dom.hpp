#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

// Error-tolerant HTML ingestion: raw bytes -> element tree -> flat pre-order
// sequence of tag names.  Text, attributes and comments are discarded; only
// the element structure matters downstream.

namespace statedup {

struct HtmlDocument {
    std::string id;                    // non-empty, unique within a corpus
    std::string raw;                   // undecoded response body
    std::optional<std::string> label;  // ground-truth state label, if known
};

// Element node.  Tag names are ASCII-lowercased by the parser.
struct DomNode {
    std::string name;
    std::vector<DomNode> children;
};

struct DomTree {
    DomNode root;  // always the <html> element
};

// Pre-order tag-name sequence.  Tokens never contain whitespace, angle
// brackets or NUL (the tokenizer stops tag names at those characters).
struct DomSequence {
    std::vector<std::string> elements;

    std::size_t length() const { return elements.size(); }
    bool empty() const { return elements.empty(); }
    bool operator==(const DomSequence&) const = default;
};

// Drops uninteresting tags from a sequence.  Operates token-wise on the
// serialized sequence, so applying it twice is a no-op.  Note that for
// container tags (anything not in the default set) removal keeps the
// children's tokens; the default exclusions are all childless in practice.
struct ElementFilter {
    std::unordered_set<std::string> excluded_tags;

    // script/style/noscript are invisible to a scripting browser, the rest
    // carry no layout structure of their own.
    static ElementFilter standard();
    static ElementFilter none();

    bool excludes(std::string_view tag) const;
    DomSequence apply(DomSequence seq) const;
};

// Decodes a response body: strips a UTF-8 BOM, transcodes UTF-16 when a BOM
// announces it, otherwise validates UTF-8.  Throws EncodingError.
std::string decode_html_bytes(std::string_view raw);

// Parses decoded markup.  Never rejects: unclosed tags, stray end tags and
// bogus constructs degrade to a best-effort tree.  <html>, <head> and <body>
// are synthesized when missing.  Nesting deeper than kMaxTreeDepth is
// flattened (children become siblings) to keep degenerate inputs harmless.
inline constexpr std::size_t kMaxTreeDepth = 256;
DomTree parse_html_text(std::string_view html);

// decode + parse; throws InputEmptyError when doc.raw is empty.
DomTree parse_html(const HtmlDocument& doc);

// Pre-order traversal with the filter applied.  Deterministic: equal raw
// bytes always give equal sequences.
DomSequence serialize(const DomTree& tree, const ElementFilter& filter = ElementFilter::standard());

// Re-emits tag-only markup for a parsed tree (round-trip/debug aid; text is
// already gone at this point).
std::string to_html(const DomTree& tree);

}  // namespace statedup
