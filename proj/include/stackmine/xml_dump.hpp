#pragma once

// Streaming parser for the Stack Exchange Posts.xml row schema. Memory use is
// bounded by the largest single <row .../> element, never by file size.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace stackmine {

struct ParseIssue {
    std::size_t line = 0;
    std::string message;
};

struct DumpStats {
    std::size_t rows_seen = 0;
    std::size_t posts_emitted = 0;
    std::size_t skipped_other_types = 0;
    std::vector<ParseIssue> ledger;
    std::size_t peak_buffer_bytes = 0;
    bool truncated = false;
};

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "lt") out += '<';
        else if (name == "gt") out += '>';
        else if (name == "amp") out += '&';
        else if (name == "quot") out += '"';
        else if (name == "apos") out += '\'';
        else if (!name.empty() && name[0] == '#') {
            long code = 0;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X'))
                code = std::strtol(std::string(name.substr(2)).c_str(), nullptr, 16);
            else
                code = std::strtol(std::string(name.substr(1)).c_str(), nullptr, 10);
            // UTF-8 encode
            if (code < 0x80) out += static_cast<char>(code);
            else if (code < 0x800) {
                out += static_cast<char>(0xC0 | (code >> 6));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else if (code < 0x10000) {
                out += static_cast<char>(0xE0 | (code >> 12));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else {
                out += static_cast<char>(0xF0 | (code >> 18));
                out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            }
        } else {
            out += s[i++];
            continue;
        }
        i = semi + 1;
    }
    return out;
}

// "&lt;android&gt;&lt;gradle&gt;" -> {"android", "gradle"}, lowercased
inline std::vector<std::string> parse_tag_list(const std::string& encoded) {
    std::string decoded = decode_entities(encoded);
    std::vector<std::string> tags;
    std::string cur;
    bool open = false;
    for (char c : decoded) {
        if (c == '<') {
            open = true;
            cur.clear();
        } else if (c == '>') {
            if (open && !cur.empty()) tags.push_back(cur);
            open = false;
        } else if (open) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return tags;
}

namespace detail {

struct RowAttrs {
    std::map<std::string, std::string> kv;  // raw (entity-encoded) values
    bool ok = false;
    std::string error;
    std::size_t consumed = 0;  // bytes consumed from the buffer offset
    bool incomplete = false;   // ran out of buffer before "/>"
};

// Parse attributes of a "<row ... />" element starting at buf[pos] (just past
// "<row"). Attribute values are double-quoted; a literal '<' inside a value is
// malformed (dumps always encode it).
inline RowAttrs parse_row_attrs(std::string_view buf, std::size_t pos) {
    RowAttrs r;
    std::size_t i = pos;
    auto fail = [&](std::string msg, std::size_t at) {
        r.error = std::move(msg);
        r.consumed = at - pos;
        return r;
    };
    for (;;) {
        while (i < buf.size() && std::isspace(static_cast<unsigned char>(buf[i]))) ++i;
        if (i >= buf.size()) {
            r.incomplete = true;
            return r;
        }
        if (buf[i] == '/') {
            if (i + 1 >= buf.size()) {
                r.incomplete = true;
                return r;
            }
            if (buf[i + 1] != '>') return fail("expected '/>'", i);
            r.ok = true;
            r.consumed = i + 2 - pos;
            return r;
        }
        if (buf[i] == '>') return fail("row element not self-closing", i);
        std::size_t name_start = i;
        while (i < buf.size() && buf[i] != '=' &&
               !std::isspace(static_cast<unsigned char>(buf[i])) && buf[i] != '<')
            ++i;
        if (i >= buf.size()) {
            r.incomplete = true;
            return r;
        }
        if (buf[i] != '=' || i == name_start)
            return fail("malformed attribute", name_start);
        std::string name(buf.substr(name_start, i - name_start));
        ++i;
        if (i >= buf.size()) {
            r.incomplete = true;
            return r;
        }
        if (buf[i] != '"') return fail("attribute value not quoted", i);
        ++i;
        std::size_t val_start = i;
        while (i < buf.size() && buf[i] != '"' && buf[i] != '<') ++i;
        if (i >= buf.size()) {
            r.incomplete = true;
            return r;
        }
        if (buf[i] == '<') return fail("unterminated attribute value", i);
        r.kv[name] = std::string(buf.substr(val_start, i - val_start));
        ++i;
    }
}

inline bool parse_int(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtoll(s.c_str(), &end, 10);
    return end && *end == '\0';
}

}  // namespace detail

// Streams RawPosts out of a Posts.xml byte stream. `sink` is invoked once per
// question/answer row; rows with other PostTypeIds are skipped. Malformed rows
// land in the ledger and parsing continues at the next row.
template <typename Sink>
DumpStats parse_dump_rows(std::istream& in, Sink&& sink) {
    DumpStats stats;
    std::string buf;
    std::size_t line = 1;          // line number of buf[0]
    constexpr std::size_t kChunk = 1 << 16;
    bool eof = false;

    auto count_lines = [](std::string_view s) {
        std::size_t n = 0;
        for (char c : s)
            if (c == '\n') ++n;
        return n;
    };

    auto handle_row = [&](const detail::RowAttrs& attrs, std::size_t row_line) {
        ++stats.rows_seen;
        auto get = [&](const char* k) -> const std::string* {
            auto it = attrs.kv.find(k);
            return it == attrs.kv.end() ? nullptr : &it->second;
        };
        const std::string* type = get("PostTypeId");
        std::int64_t type_id = 0;
        if (!type || !detail::parse_int(*type, type_id)) {
            stats.ledger.push_back({row_line, "missing or bad PostTypeId"});
            return;
        }
        if (type_id != 1 && type_id != 2) {
            ++stats.skipped_other_types;
            return;
        }
        RawPost p;
        const std::string* id = get("Id");
        if (!id || !detail::parse_int(*id, p.post_id) || p.post_id <= 0) {
            stats.ledger.push_back({row_line, "missing or bad Id"});
            return;
        }
        const std::string* date = get("CreationDate");
        if (!date) {
            stats.ledger.push_back({row_line, "missing CreationDate"});
            return;
        }
        try {
            p.created_at = parse_utc(decode_entities(*date));
        } catch (const std::exception&) {
            stats.ledger.push_back({row_line, "bad CreationDate"});
            return;
        }
        if (const std::string* sc = get("Score")) {
            std::int64_t v = 0;
            if (!detail::parse_int(*sc, v)) {
                stats.ledger.push_back({row_line, "bad Score"});
                return;
            }
            p.score = static_cast<int>(v);
        }
        if (const std::string* body = get("Body")) p.body_html = decode_entities(*body);
        if (type_id == 1) {
            p.kind = PostKind::question;
            if (const std::string* t = get("Title")) p.title = decode_entities(*t);
            if (const std::string* t = get("Tags")) p.tags = parse_tag_list(*t);
            std::int64_t acc = 0;
            if (const std::string* a = get("AcceptedAnswerId");
                a && detail::parse_int(*a, acc))
                p.accepted_answer_id = acc;
        } else {
            p.kind = PostKind::answer;
            std::int64_t parent = 0;
            const std::string* pp = get("ParentId");
            if (!pp || !detail::parse_int(*pp, parent) || parent <= 0) {
                stats.ledger.push_back({row_line, "answer without ParentId"});
                return;
            }
            p.parent_id = parent;
        }
        ++stats.posts_emitted;
        sink(std::move(p));
    };

    for (;;) {
        if (!eof && buf.size() < kChunk * 2) {
            std::size_t old = buf.size();
            buf.resize(old + kChunk);
            in.read(buf.data() + old, static_cast<std::streamsize>(kChunk));
            buf.resize(old + static_cast<std::size_t>(in.gcount()));
            if (in.gcount() == 0) eof = true;
            stats.peak_buffer_bytes = std::max(stats.peak_buffer_bytes, buf.size());
        }
        auto start = buf.find("<row");
        if (start == std::string::npos) {
            if (eof) break;
            // keep a small tail in case "<row" straddles the chunk boundary
            std::size_t keep = buf.size() < 8 ? buf.size() : 8;
            std::size_t drop = buf.size() - keep;
            line += count_lines(std::string_view(buf).substr(0, drop));
            buf.erase(0, drop);
            continue;
        }
        std::size_t row_line = line + count_lines(std::string_view(buf).substr(0, start));
        auto attrs = detail::parse_row_attrs(buf, start + 4);
        if (attrs.incomplete) {
            if (!eof) {
                // need more input; drop everything before the row start
                line = row_line;
                buf.erase(0, start);
                std::size_t old = buf.size();
                buf.resize(old + kChunk);
                in.read(buf.data() + old, static_cast<std::streamsize>(kChunk));
                buf.resize(old + static_cast<std::size_t>(in.gcount()));
                if (in.gcount() == 0) eof = true;
                stats.peak_buffer_bytes = std::max(stats.peak_buffer_bytes, buf.size());
                continue;
            }
            stats.truncated = true;
            stats.ledger.push_back({row_line, "file truncated inside row element"});
            break;
        }
        if (!attrs.ok) {
            stats.ledger.push_back({row_line, attrs.error});
            // resync: skip past the row opener and look for the next one
            std::size_t resume = start + 4 + std::max<std::size_t>(attrs.consumed, 1);
            resume = std::min(resume, buf.size());
            line += count_lines(std::string_view(buf).substr(0, resume));
            buf.erase(0, resume);
            continue;
        }
        handle_row(attrs, row_line);
        std::size_t consumed = start + 4 + attrs.consumed;
        line += count_lines(std::string_view(buf).substr(0, consumed));
        buf.erase(0, consumed);
    }
    return stats;
}

template <typename Sink>
DumpStats parse_dump_file(const std::string& path, Sink&& sink) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dump: " + path);
    return parse_dump_rows(in, std::forward<Sink>(sink));
}

}  // namespace stackmine
