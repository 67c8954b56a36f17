#pragma once

// Best-effort splitter for Stack Exchange body HTML: block code out,
// readable prose kept. Never throws on malformed markup.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "xml_dump.hpp"  // decode_entities

namespace stackmine {

struct SplitBody {
    std::string prose_text;
    std::vector<std::string> code_snippets;  // document order, verbatim
};

namespace detail {

inline bool is_block_tag(std::string_view name) {
    static const char* kBlocks[] = {"p",   "div", "pre", "br",  "li", "ul",
                                    "ol",  "blockquote", "h1",  "h2", "h3",
                                    "h4",  "h5",  "h6",  "table", "tr", "td",
                                    "th",  "hr",  "dl",  "dt",  "dd"};
    for (const char* b : kBlocks)
        if (name == b) return true;
    return false;
}

inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += c;
        }
    }
    return out;
}

}  // namespace detail

inline SplitBody split_html(std::string_view body_html) {
    SplitBody out;
    std::string prose;
    std::string code;
    int pre_depth = 0;
    int code_depth = 0;

    auto flush_snippet = [&]() {
        out.code_snippets.push_back(decode_entities(code));
        code.clear();
    };

    std::size_t i = 0;
    const std::size_t n = body_html.size();
    while (i < n) {
        char c = body_html[i];
        if (c != '<') {
            if (pre_depth > 0)
                code += c;
            else
                prose += c;
            ++i;
            continue;
        }
        // comment?
        if (body_html.substr(i, 4) == "<!--") {
            auto end = body_html.find("-->", i + 4);
            i = end == std::string_view::npos ? n : end + 3;
            continue;
        }
        auto close = body_html.find('>', i);
        if (close == std::string_view::npos) {
            // dangling '<': keep the rest as text, best effort
            if (pre_depth > 0)
                code += body_html.substr(i);
            else
                prose += body_html.substr(i);
            break;
        }
        std::string_view tag = body_html.substr(i + 1, close - i - 1);
        bool closing = !tag.empty() && tag[0] == '/';
        if (closing) tag.remove_prefix(1);
        std::size_t name_end = 0;
        while (name_end < tag.size() &&
               (std::isalnum(static_cast<unsigned char>(tag[name_end]))))
            ++name_end;
        std::string name;
        for (std::size_t k = 0; k < name_end; ++k)
            name += static_cast<char>(std::tolower(static_cast<unsigned char>(tag[k])));

        if (name == "pre") {
            if (!closing) {
                ++pre_depth;
            } else if (pre_depth > 0) {
                --pre_depth;
                if (pre_depth == 0) flush_snippet();
            }
            prose += ' ';
        } else if (name == "code") {
            if (!closing)
                ++code_depth;
            else if (code_depth > 0)
                --code_depth;
            // inline code text stays in the prose; block code is handled by <pre>
        } else {
            if (pre_depth > 0) {
                // unexpected markup inside a code block: drop the tag, keep text
            } else if (detail::is_block_tag(name)) {
                prose += ' ';
            }
        }
        i = close + 1;
    }
    if (pre_depth > 0 && !code.empty()) flush_snippet();  // unbalanced <pre>
    out.prose_text = detail::collapse_whitespace(decode_entities(prose));
    return out;
}

}  // namespace stackmine
