#include "statedup/corpus_gen.hpp"

#include <algorithm>
#include <string_view>

#include "statedup/errors.hpp"
#include "statedup/hashing.hpp"

namespace statedup {

namespace {

// Self-contained counter RNG so corpora are identical across platforms and
// standard libraries (std::uniform_int_distribution is not portable).
struct Rng {
    std::uint64_t state;

    std::uint64_t next() { return hashing::splitmix64(state); }
    std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }
    std::uint32_t between(std::uint32_t lo, std::uint32_t hi) {  // inclusive
        return lo + below(hi - lo + 1);
    }
    bool chance(double p) { return (next() >> 11) * 0x1.0p-53 < p; }
    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[below(static_cast<std::uint32_t>(v.size()))]; }
};

Rng rng_for(std::uint64_t seed, std::uint64_t stream) {
    return Rng{hashing::mix64(seed ^ hashing::mix64(stream))};
}

const std::vector<std::string> kWords = {
    "account", "archive",  "balance", "catalog", "change",  "dashboard", "detail",
    "draft",   "editor",   "entry",   "export",  "filter",  "history",   "invoice",
    "market",  "message",  "monitor", "network", "notice",  "order",     "overview",
    "payment", "profile",  "queue",   "record",  "report",  "request",   "result",
    "review",  "schedule", "search",  "session", "setting", "status",    "summary",
    "ticket",  "total",    "update",  "upload",  "value",
};

const std::vector<std::string> kInlineTags = {"span", "a", "em", "strong", "b", "i", "code", "small"};

struct GenNode {
    std::string tag;
    std::string text;  // emitted before children
    std::vector<GenNode> kids;
};

std::string words(Rng& rng, std::uint32_t lo, std::uint32_t hi) {
    std::uint32_t n = rng.between(lo, hi);
    std::string out;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += rng.pick(kWords);
    }
    return out;
}

GenNode leaf(std::string tag, std::string text = "") {
    return GenNode{std::move(tag), std::move(text), {}};
}

GenNode inline_leaf(Rng& rng) { return leaf(rng.pick(kInlineTags), words(rng, 1, 3)); }

std::size_t count_tokens(const GenNode& n) {
    std::size_t c = 1;
    for (const GenNode& k : n.kids) c += count_tokens(k);
    return c;
}

// ----------------------------------------------------------- components

GenNode make_nav(Rng& rng) {
    GenNode ul{"ul", "", {}};
    std::uint32_t items = rng.between(3, 7);
    for (std::uint32_t i = 0; i < items; ++i) {
        GenNode li{"li", "", {leaf("a", words(rng, 1, 2))}};
        if (rng.chance(0.4)) li.kids.push_back(leaf("span", words(rng, 1, 1)));
        ul.kids.push_back(std::move(li));
    }
    return GenNode{"nav", "", {std::move(ul)}};
}

GenNode make_cards(Rng& rng) {
    GenNode section{"section", "", {leaf("h2", words(rng, 1, 3))}};
    std::uint32_t cards = rng.between(2, 4);
    bool with_figure = rng.chance(0.5);
    for (std::uint32_t i = 0; i < cards; ++i) {
        GenNode article{"article", "", {GenNode{"header", "", {leaf("h3", words(rng, 1, 3))}}}};
        if (with_figure)
            article.kids.push_back(GenNode{"figure", "", {leaf("img"), leaf("figcaption", words(rng, 1, 3))}});
        std::uint32_t paras = rng.between(1, 3);
        for (std::uint32_t p = 0; p < paras; ++p) {
            GenNode para{"p", words(rng, 3, 8), {}};
            std::uint32_t spans = rng.between(0, 2);
            for (std::uint32_t s = 0; s < spans; ++s) para.kids.push_back(inline_leaf(rng));
            article.kids.push_back(std::move(para));
        }
        article.kids.push_back(GenNode{"footer", "", {inline_leaf(rng)}});
        section.kids.push_back(std::move(article));
    }
    return section;
}

GenNode make_table(Rng& rng) {
    std::uint32_t cols = rng.between(2, 5);
    std::uint32_t rows = rng.between(2, 5);
    // Per-template cell decoration pattern, one choice per column.
    std::vector<std::string> cell_wrap;
    for (std::uint32_t c = 0; c < cols; ++c)
        cell_wrap.push_back(rng.chance(0.5) ? rng.pick(kInlineTags) : "");

    GenNode thead{"thead", "", {}};
    GenNode hrow{"tr", "", {}};
    for (std::uint32_t c = 0; c < cols; ++c) hrow.kids.push_back(leaf("th", words(rng, 1, 2)));
    thead.kids.push_back(std::move(hrow));
    GenNode table{"table", "", {std::move(thead)}};
    for (std::uint32_t r = 0; r < rows; ++r) {
        GenNode row{"tr", "", {}};
        for (std::uint32_t c = 0; c < cols; ++c) {
            GenNode td{"td", "", {}};
            if (cell_wrap[c].empty()) td.text = words(rng, 1, 2);
            else td.kids.push_back(leaf(cell_wrap[c], words(rng, 1, 2)));
            row.kids.push_back(std::move(td));
        }
        table.kids.push_back(std::move(row));
    }
    return GenNode{"section", "", {leaf("h2", words(rng, 1, 3)), std::move(table)}};
}

GenNode make_form(Rng& rng) {
    GenNode form{"form", "", {}};
    std::uint32_t fields = rng.between(2, 5);
    for (std::uint32_t i = 0; i < fields; ++i)
        form.kids.push_back(GenNode{"div", "", {leaf("label", words(rng, 1, 2)), leaf("input")}});
    form.kids.push_back(GenNode{"div", "", {leaf("button", words(rng, 1, 1))}});
    return form;
}

GenNode make_media(Rng& rng) {
    GenNode section{"section", "", {}};
    std::uint32_t figs = rng.between(1, 3);
    for (std::uint32_t i = 0; i < figs; ++i)
        section.kids.push_back(GenNode{"figure", "", {leaf("img"), leaf("figcaption", words(rng, 1, 4))}});
    std::uint32_t paras = rng.between(0, 2);
    for (std::uint32_t p = 0; p < paras; ++p) section.kids.push_back(leaf("p", words(rng, 4, 9)));
    return section;
}

GenNode make_article(Rng& rng) {
    GenNode article{"article", "", {leaf("h3", words(rng, 1, 3))}};
    std::uint32_t paras = rng.between(2, 5);
    for (std::uint32_t p = 0; p < paras; ++p) {
        GenNode para{"p", words(rng, 4, 10), {}};
        std::uint32_t kids = rng.between(0, 3);
        for (std::uint32_t s = 0; s < kids; ++s) para.kids.push_back(inline_leaf(rng));
        article.kids.push_back(std::move(para));
    }
    return article;
}

GenNode make_sidebar(Rng& rng) {
    GenNode ul{"ul", "", {}};
    std::uint32_t items = rng.between(2, 5);
    for (std::uint32_t i = 0; i < items; ++i)
        ul.kids.push_back(GenNode{"li", "", {inline_leaf(rng)}});
    return GenNode{"aside", "", {leaf("h4", words(rng, 1, 2)), std::move(ul)}};
}

GenNode make_component(Rng& rng) {
    switch (rng.below(7)) {
        case 0: return make_nav(rng);
        case 1: return make_cards(rng);
        case 2: return make_table(rng);
        case 3: return make_form(rng);
        case 4: return make_media(rng);
        case 5: return make_article(rng);
        default: return make_sidebar(rng);
    }
}

// ------------------------------------------------------------- template

struct TemplateModel {
    GenNode tree;                 // full html tree
    std::size_t repeat_component = 0;  // index into body kids (repeat mode)
    GenNode repeat_item;               // the unit that gets repeated
};

GenNode* body_of(GenNode& html) { return &html.kids[1]; }

TemplateModel make_template(Rng& rng, const GeneratorSpec& spec) {
    TemplateModel model;
    GenNode head{"head", "", {leaf("title", words(rng, 1, 3))}};
    GenNode body{"body", "", {}};
    model.tree = GenNode{"html", "", {std::move(head), std::move(body)}};

    GenNode* body_node = body_of(model.tree);
    if (spec.repeat_expansion) {
        // A uniform list whose item is at least a full window minus one
        // token (|item| >= k-1): then any window overlapping the list sees
        // at most two consecutive items, so every repetition count >= 2
        // produces exactly the same window set.  (Half-window items are NOT
        // enough: an item of size |R| with k > |R|+1 leaves room for windows
        // that only exist at three-item alignments.)
        std::uint32_t item_kids =
            std::max<std::uint32_t>(2, spec.shingle_k - 1 + rng.between(0, 2));
        GenNode item{"li", "", {}};
        for (std::uint32_t i = 0; i < item_kids; ++i)
            item.kids.push_back(leaf(kInlineTags[i % kInlineTags.size()], words(rng, 1, 2)));
        model.repeat_item = item;
        GenNode list{"ul", "", {item, item}};  // base repetition count: 2
        model.repeat_component = 0;
        body_node->kids.push_back(GenNode{"section", "", {std::move(list)}});
    }

    const std::uint32_t span = spec.max_tokens > spec.min_tokens + 120
                                   ? spec.max_tokens - spec.min_tokens - 120
                                   : 1;
    const std::size_t target = spec.min_tokens + rng.below(span);
    while (count_tokens(model.tree) < target) body_node->kids.push_back(make_component(rng));
    return model;
}

// -------------------------------------------------------------- variants

void collect(GenNode& n, std::vector<GenNode*>& out) {
    out.push_back(&n);
    for (GenNode& k : n.kids) collect(k, out);
}

bool is_void_tag(std::string_view t) {
    return t == "img" || t == "input" || t == "br" || t == "hr";
}

void apply_element_edits(Rng& rng, GenNode& body, std::size_t edits) {
    for (std::size_t e = 0; e < edits; ++e) {
        std::vector<GenNode*> nodes;
        collect(body, nodes);
        switch (rng.below(3)) {
            case 0: {  // insert a leaf somewhere
                std::vector<GenNode*> parents;
                for (GenNode* n : nodes)
                    if (!is_void_tag(n->tag)) parents.push_back(n);
                GenNode* p = parents[rng.below(static_cast<std::uint32_t>(parents.size()))];
                auto at = rng.below(static_cast<std::uint32_t>(p->kids.size() + 1));
                p->kids.insert(p->kids.begin() + at, inline_leaf(rng));
                break;
            }
            case 1: {  // delete a leaf
                std::vector<GenNode*> parents;
                for (GenNode* n : nodes)
                    if (!n->kids.empty() && n != &body) parents.push_back(n);
                if (parents.empty() && body.kids.empty()) break;
                GenNode* p = parents.empty()
                                 ? &body
                                 : parents[rng.below(static_cast<std::uint32_t>(parents.size()))];
                std::vector<std::size_t> leaf_at;
                for (std::size_t i = 0; i < p->kids.size(); ++i)
                    if (p->kids[i].kids.empty()) leaf_at.push_back(i);
                if (leaf_at.empty()) break;
                p->kids.erase(p->kids.begin() +
                              leaf_at[rng.below(static_cast<std::uint32_t>(leaf_at.size()))]);
                break;
            }
            default: {  // retag a leaf
                std::vector<GenNode*> leaves;
                for (GenNode* n : nodes)
                    if (n->kids.empty() && n != &body) leaves.push_back(n);
                if (leaves.empty()) break;
                GenNode* n = leaves[rng.below(static_cast<std::uint32_t>(leaves.size()))];
                std::string t = rng.pick(kInlineTags);
                while (t == n->tag) t = rng.pick(kInlineTags);
                n->tag = std::move(t);
                break;
            }
        }
    }
}

void refresh_text(Rng& rng, GenNode& n) {
    if (!n.text.empty()) n.text = words(rng, 1, 6);
    for (GenNode& k : n.kids) refresh_text(rng, k);
}

GenNode make_popup(Rng& rng) {
    GenNode inner{"div", "", {leaf("h2", "notice"), leaf("p", words(rng, 3, 6)),
                              leaf("p", words(rng, 3, 6)), leaf("button", "close")}};
    return GenNode{"div", "", {std::move(inner)}};
}

// --------------------------------------------------------------- rendering

const char* fixed_attrs(std::string_view tag) {
    if (tag == "a") return " href=\"#\"";
    if (tag == "img") return " src=\"asset.png\" alt=\"\"";
    if (tag == "input") return " type=\"text\"";
    if (tag == "form") return " method=\"post\"";
    return "";
}

void render(const GenNode& n, std::string& out, int depth) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += '<';
    out += n.tag;
    out += fixed_attrs(n.tag);
    out += '>';
    if (is_void_tag(n.tag)) {
        out += '\n';
        return;
    }
    out += n.text;
    if (n.kids.empty()) {
        out += "</" + n.tag + ">\n";
        return;
    }
    out += '\n';
    for (const GenNode& k : n.kids) render(k, out, depth + 1);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "</" + n.tag + ">\n";
}

std::string render_document(const GenNode& html) {
    std::string out = "<!doctype html>\n";
    render(html, out, 0);
    return out;
}

std::string zero_pad(std::uint32_t v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

}  // namespace

GeneratedCorpus generate_corpus(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.templates == 0 || spec.variants_per_template == 0)
        throw InvalidParamError("corpus needs at least one template and one variant");
    if (!(spec.element_edit_rate >= 0.0) || spec.element_edit_rate >= 1.0)
        throw InvalidParamError("element edit rate must be in [0, 1)");
    if (spec.min_tokens < 32 || spec.max_tokens < spec.min_tokens)
        throw InvalidParamError("bad token range");
    if (spec.shingle_k == 0) throw InvalidParamError("shingle width k must be positive");

    GeneratedCorpus corpus;
    corpus.documents.reserve(std::size_t{spec.templates} * spec.variants_per_template);

    for (std::uint32_t ti = 0; ti < spec.templates; ++ti) {
        Rng trng = rng_for(seed, 0x7E00000000ULL + ti);
        TemplateModel model = make_template(trng, spec);
        const std::size_t tokens = count_tokens(model.tree);
        const auto edits = static_cast<std::size_t>(spec.element_edit_rate *
                                                        static_cast<double>(tokens) + 0.5);
        const std::string label = "template_" + zero_pad(ti);

        for (std::uint32_t vi = 0; vi < spec.variants_per_template; ++vi) {
            Rng vrng = rng_for(seed, (std::uint64_t{ti} << 24) ^ vi ^ 0xA500000000ULL);
            GenNode tree = model.tree;  // deep copy
            GenNode* body = body_of(tree);

            if (spec.repeat_expansion) {
                GenNode& list = body->kids[model.repeat_component].kids[0];
                const std::uint32_t reps = vrng.between(2, 6);
                list.kids.assign(reps, model.repeat_item);
            }
            if (spec.component_shuffle && body->kids.size() > 1) {
                for (std::size_t i = body->kids.size() - 1; i > 0; --i)
                    std::swap(body->kids[i],
                              body->kids[vrng.below(static_cast<std::uint32_t>(i + 1))]);
            }
            apply_element_edits(vrng, *body, edits);
            if (spec.popup_injection && vrng.chance(0.3)) body->kids.push_back(make_popup(vrng));
            if (spec.text_noise) refresh_text(vrng, tree);

            const std::string id = "t" + zero_pad(ti) + "_v" + zero_pad(vi);
            corpus.documents.push_back(HtmlDocument{id, render_document(tree), label});
            corpus.truth.labels.emplace(id, label);
        }
    }
    return corpus;
}

}  // namespace statedup
