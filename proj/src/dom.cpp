#include "statedup/dom.hpp"

#include <initializer_list>

#include "statedup/errors.hpp"

namespace statedup {

namespace {

bool is_ascii_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

const std::unordered_set<std::string_view> kVoidElements = {
    "area", "base", "basefont", "bgsound", "br", "col", "embed", "frame",
    "hr", "img", "input", "keygen", "link", "meta", "param", "source",
    "track", "wbr",
};

// Content of these is consumed as raw text up to the matching end tag.
// noscript is included because a scripting client never renders its
// fallback content.
const std::unordered_set<std::string_view> kRawTextElements = {
    "script", "style", "textarea", "title", "xmp", "iframe", "noembed",
    "noframes", "noscript",
};

// Tags that live in <head> when seen before any body content.
const std::unordered_set<std::string_view> kHeadElements = {
    "base", "basefont", "bgsound", "link", "meta", "noframes", "noscript",
    "style", "script", "template", "title",
};

// Start tags that implicitly close an open <p>.
const std::unordered_set<std::string_view> kClosesP = {
    "address", "article", "aside", "blockquote", "center", "details",
    "dialog", "dir", "div", "dl", "fieldset", "figcaption", "figure",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
    "hgroup", "hr", "listing", "main", "menu", "nav", "ol", "p", "pre",
    "section", "summary", "table", "ul", "xmp",
};

bool is_heading(std::string_view t) {
    return t.size() == 2 && t[0] == 'h' && t[1] >= '1' && t[1] <= '6';
}

// ---------------------------------------------------------------- tokenizer

struct Token {
    enum Kind { StartTag, EndTag, Text, Eof } kind = Eof;
    std::string name;          // lowercased tag name (Start/End only)
    bool self_closing = false;
};

class Lexer {
public:
    explicit Lexer(std::string_view in) : in_(in) {}

    // After a raw-text start tag the builder asks us to swallow everything
    // up to the matching end tag.
    void enter_raw_text(std::string_view tag) { raw_tag_ = tag; }

    Token next() {
        if (!raw_tag_.empty()) {
            skip_raw_text();
            raw_tag_.clear();
        }
        while (pos_ < in_.size()) {
            if (in_[pos_] != '<') {
                if (scan_text()) return {Token::Text, "", false};
                continue;
            }
            // We are at '<'.
            if (pos_ + 1 >= in_.size()) { pos_ = in_.size(); return {Token::Text, "", false}; }
            char c = in_[pos_ + 1];
            if (is_ascii_letter(c)) return scan_tag(false);
            if (c == '/') {
                if (pos_ + 2 < in_.size() && is_ascii_letter(in_[pos_ + 2])) return scan_tag(true);
                skip_until('>');  // bogus "</..." comment
                continue;
            }
            if (c == '!') {
                if (in_.compare(pos_, 4, "<!--") == 0) { skip_comment(); continue; }
                skip_until('>');  // doctype, CDATA and friends
                continue;
            }
            if (c == '?') { skip_until('>'); continue; }
            // Lone '<' is text content.
            ++pos_;
            return {Token::Text, "", false};
        }
        return {Token::Eof, "", false};
    }

private:
    // Returns true if the skipped run contained non-whitespace.
    bool scan_text() {
        bool significant = false;
        while (pos_ < in_.size() && in_[pos_] != '<') {
            if (!is_ws(in_[pos_])) significant = true;
            ++pos_;
        }
        return significant;
    }

    void skip_until(char stop) {
        while (pos_ < in_.size() && in_[pos_] != stop) ++pos_;
        if (pos_ < in_.size()) ++pos_;  // consume the stop char
    }

    void skip_comment() {
        std::size_t end = in_.find("-->", pos_ + 4);
        pos_ = (end == std::string_view::npos) ? in_.size() : end + 3;
    }

    Token scan_tag(bool end_tag) {
        pos_ += end_tag ? 2 : 1;
        std::string name;
        while (pos_ < in_.size()) {
            char c = in_[pos_];
            if (is_ws(c) || c == '>' || c == '/' || c == '<' || c == '\0') break;
            name.push_back(to_lower_ascii(c));
            ++pos_;
        }
        Token tok{end_tag ? Token::EndTag : Token::StartTag, std::move(name), false};
        // Attribute soup: skipped, but quotes may hide '>'.
        while (pos_ < in_.size()) {
            char c = in_[pos_];
            if (c == '>') { ++pos_; break; }
            if (c == '<') break;  // tag was never closed; reprocess from here
            if (c == '/' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '>') {
                tok.self_closing = true;
                pos_ += 2;
                break;
            }
            if (c == '"' || c == '\'') {
                ++pos_;
                while (pos_ < in_.size() && in_[pos_] != c) ++pos_;
                if (pos_ < in_.size()) ++pos_;
                continue;
            }
            ++pos_;
        }
        return tok;
    }

    void skip_raw_text() {
        std::size_t search = pos_;
        while (search < in_.size()) {
            std::size_t lt = in_.find('<', search);
            if (lt == std::string_view::npos || lt + 1 >= in_.size()) { pos_ = in_.size(); return; }
            if (in_[lt + 1] != '/') { search = lt + 1; continue; }
            std::size_t name_at = lt + 2;
            if (name_at + raw_tag_.size() > in_.size()) { pos_ = in_.size(); return; }
            bool match = true;
            for (std::size_t i = 0; i < raw_tag_.size(); ++i) {
                if (to_lower_ascii(in_[name_at + i]) != raw_tag_[i]) { match = false; break; }
            }
            if (match) {
                std::size_t after = name_at + raw_tag_.size();
                if (after >= in_.size() || is_ws(in_[after]) || in_[after] == '>' || in_[after] == '/') {
                    // Swallow the whole end tag (attrs after the name are junk).
                    pos_ = after;
                    while (pos_ < in_.size() && in_[pos_] != '>') ++pos_;
                    if (pos_ < in_.size()) ++pos_;
                    return;
                }
            }
            search = lt + 1;
        }
        pos_ = in_.size();
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    std::string raw_tag_;
};

// -------------------------------------------------------------- tree builder

class TreeBuilder {
public:
    DomTree build(std::string_view html) {
        tree_.root.name = "html";
        tree_.root.children.reserve(2);  // head + body; keeps pointers stable
        stack_.clear();
        stack_.push_back(&tree_.root);

        Lexer lex(html);
        for (Token tok = lex.next(); tok.kind != Token::Eof; tok = lex.next()) {
            switch (tok.kind) {
                case Token::StartTag: start_tag(tok, lex); break;
                case Token::EndTag: end_tag(tok); break;
                case Token::Text:
                    if (!in_body_) enter_body();
                    break;
                default: break;
            }
        }
        finalize();
        return std::move(tree_);
    }

private:
    DomNode* append_child(DomNode* parent, std::string name) {
        parent->children.push_back(DomNode{std::move(name), {}});
        return &parent->children.back();
    }

    void ensure_head() {
        if (head_ == nullptr) head_ = append_child(&tree_.root, "head");
    }

    void enter_body() {
        if (in_body_) return;
        body_ = append_child(&tree_.root, "body");
        in_body_ = true;
        stack_.assign({&tree_.root, body_});
    }

    void finalize() {
        stack_.clear();
        if (head_ == nullptr) {
            // Insert before body so pre-order stays html, head, body.
            tree_.root.children.insert(tree_.root.children.begin(), DomNode{"head", {}});
        }
        if (body_ == nullptr) append_child(&tree_.root, "body");
    }

    // Pops up to and including the nearest `name` above the body, stopping
    // early at any boundary tag.  Returns true when something was closed.
    bool close_in_scope(std::string_view name, std::initializer_list<std::string_view> boundaries) {
        for (std::size_t i = stack_.size(); i-- > 2;) {  // index 0 html, 1 body
            const std::string& n = stack_[i]->name;
            if (n == name) {
                stack_.resize(i);
                return true;
            }
            for (std::string_view b : boundaries)
                if (n == b) return false;
        }
        return false;
    }

    void close_cell() {
        if (!close_in_scope("td", {"tr", "table"})) close_in_scope("th", {"tr", "table"});
    }

    void start_tag(const Token& tok, Lexer& lex) {
        const std::string& t = tok.name;
        if (t == "html") return;
        if (!in_body_) {
            if (t == "head") { ensure_head(); return; }
            if (t == "body") { enter_body(); return; }
            if (kHeadElements.count(t)) {
                ensure_head();
                append_child(head_, t);
                if (kRawTextElements.count(t)) lex.enter_raw_text(t);
                return;
            }
            enter_body();  // textarea/iframe/... are body content; fall through
        }
        if (t == "head" || t == "body") return;  // stray duplicates

        if (kClosesP.count(t)) close_in_scope("p", {"td", "th", "caption", "table"});
        if (t == "li") {
            close_in_scope("li", {"ul", "ol", "td", "th", "table"});
        } else if (t == "dd" || t == "dt") {
            if (!close_in_scope("dd", {"dl", "td", "th", "table"}))
                close_in_scope("dt", {"dl", "td", "th", "table"});
        } else if (t == "tr") {
            close_cell();
            close_in_scope("tr", {"table", "tbody", "thead", "tfoot"});
        } else if (t == "td" || t == "th") {
            close_cell();
        } else if (t == "tbody" || t == "thead" || t == "tfoot") {
            close_cell();
            close_in_scope("tr", {"table"});
            if (!close_in_scope("tbody", {"table"}))
                if (!close_in_scope("thead", {"table"})) close_in_scope("tfoot", {"table"});
        } else if (t == "option") {
            close_in_scope("option", {"select", "optgroup"});
        } else if (t == "optgroup") {
            close_in_scope("option", {"select"});
            close_in_scope("optgroup", {"select"});
        } else if (is_heading(t) && is_heading(stack_.back()->name)) {
            if (stack_.size() > 2) stack_.pop_back();
        }

        DomNode* node = append_child(stack_.back(), t);
        if (kRawTextElements.count(t)) {
            lex.enter_raw_text(t);
            return;  // leaf; content discarded
        }
        if (kVoidElements.count(t)) return;  // leaf
        // Self-closing syntax on normal elements is ignored (matches
        // browser behaviour): the element stays open.
        if (stack_.size() < kMaxTreeDepth) stack_.push_back(node);
        // Beyond the depth cap new elements pile up as siblings.
    }

    void end_tag(const Token& tok) {
        const std::string& t = tok.name;
        if (!in_body_) {
            if (t == "head") return;  // head closes implicitly
            if (t == "body" || t == "html") return;
            return;  // nothing else is open yet
        }
        if (t == "body" || t == "html") return;  // keep appending; tolerant
        if (t == "br") {
            // </br> behaves like <br> in browsers.
            append_child(stack_.back(), "br");
            return;
        }
        for (std::size_t i = stack_.size(); i-- > 2;) {
            if (stack_[i]->name == t) {
                stack_.resize(i);
                return;
            }
        }
        // Unmatched end tag: dropped.
    }

    DomTree tree_;
    std::vector<DomNode*> stack_;
    DomNode* head_ = nullptr;
    DomNode* body_ = nullptr;
    bool in_body_ = false;
};

// ----------------------------------------------------------------- decoding

void utf16_to_utf8(std::string_view raw, bool big_endian, std::string& out) {
    if (raw.size() % 2 != 0) throw EncodingError("UTF-16 input has odd byte length");
    auto unit = [&](std::size_t i) -> std::uint32_t {
        auto a = static_cast<unsigned char>(raw[i]);
        auto b = static_cast<unsigned char>(raw[i + 1]);
        return big_endian ? (std::uint32_t(a) << 8 | b) : (std::uint32_t(b) << 8 | a);
    };
    auto emit = [&](std::uint32_t cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    };
    for (std::size_t i = 0; i < raw.size(); i += 2) {
        std::uint32_t u = unit(i);
        if (u >= 0xD800 && u <= 0xDBFF) {
            if (i + 3 >= raw.size()) throw EncodingError("unpaired UTF-16 high surrogate");
            std::uint32_t lo = unit(i + 2);
            if (lo < 0xDC00 || lo > 0xDFFF) throw EncodingError("unpaired UTF-16 high surrogate");
            emit(0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
            i += 2;
        } else if (u >= 0xDC00 && u <= 0xDFFF) {
            throw EncodingError("stray UTF-16 low surrogate");
        } else {
            emit(u);
        }
    }
}

void validate_utf8(std::string_view s) {
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len;
        std::uint32_t cp;
        if (c < 0x80) { ++i; continue; }
        else if ((c & 0xE0) == 0xC0) { len = 2; cp = c & 0x1F; }
        else if ((c & 0xF0) == 0xE0) { len = 3; cp = c & 0x0F; }
        else if ((c & 0xF8) == 0xF0) { len = 4; cp = c & 0x07; }
        else throw EncodingError("invalid UTF-8 lead byte at offset " + std::to_string(i));
        if (i + len > n) throw EncodingError("truncated UTF-8 sequence at offset " + std::to_string(i));
        for (std::size_t j = 1; j < len; ++j) {
            auto cc = static_cast<unsigned char>(s[i + j]);
            if ((cc & 0xC0) != 0x80)
                throw EncodingError("invalid UTF-8 continuation at offset " + std::to_string(i + j));
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlongs, surrogates and out-of-range code points are rejected.
        static constexpr std::uint32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            throw EncodingError("invalid UTF-8 code point at offset " + std::to_string(i));
        i += len;
    }
}

}  // namespace

std::string decode_html_bytes(std::string_view raw) {
    if (raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        std::string_view body = raw.substr(3);
        validate_utf8(body);
        return std::string(body);
    }
    if (raw.size() >= 2 && raw.compare(0, 2, "\xFF\xFE") == 0) {
        std::string out;
        out.reserve(raw.size() / 2);
        utf16_to_utf8(raw.substr(2), /*big_endian=*/false, out);
        return out;
    }
    if (raw.size() >= 2 && raw.compare(0, 2, "\xFE\xFF") == 0) {
        std::string out;
        out.reserve(raw.size() / 2);
        utf16_to_utf8(raw.substr(2), /*big_endian=*/true, out);
        return out;
    }
    validate_utf8(raw);
    return std::string(raw);
}

DomTree parse_html_text(std::string_view html) {
    TreeBuilder builder;
    return builder.build(html);
}

DomTree parse_html(const HtmlDocument& doc) {
    if (doc.raw.empty()) throw InputEmptyError("document '" + doc.id + "': empty body");
    std::string decoded = decode_html_bytes(doc.raw);
    return parse_html_text(decoded);
}

ElementFilter ElementFilter::standard() {
    return ElementFilter{{"script", "style", "noscript", "meta", "link", "br", "wbr"}};
}

ElementFilter ElementFilter::none() { return ElementFilter{}; }

bool ElementFilter::excludes(std::string_view tag) const {
    return excluded_tags.count(std::string(tag)) > 0;
}

DomSequence ElementFilter::apply(DomSequence seq) const {
    if (excluded_tags.empty()) return seq;
    std::erase_if(seq.elements,
                  [&](const std::string& t) { return excluded_tags.count(t) > 0; });
    return seq;
}

DomSequence serialize(const DomTree& tree, const ElementFilter& filter) {
    DomSequence seq;
    std::vector<const DomNode*> work{&tree.root};
    while (!work.empty()) {
        const DomNode* n = work.back();
        work.pop_back();
        seq.elements.push_back(n->name);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
            work.push_back(&*it);
    }
    return filter.apply(std::move(seq));
}

std::string to_html(const DomTree& tree) {
    std::string out;
    struct Frame {
        const DomNode* node;
        std::size_t next_child;
    };
    std::vector<Frame> stack{{&tree.root, 0}};
    out += "<" + tree.root.name + ">";
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_child < f.node->children.size()) {
            const DomNode* child = &f.node->children[f.next_child++];
            out += "<" + child->name + ">";
            if (kVoidElements.count(child->name) && child->children.empty()) continue;
            stack.push_back({child, 0});
        } else {
            out += "</" + f.node->name + ">";
            stack.pop_back();
        }
    }
    return out;
}

}  // namespace statedup
