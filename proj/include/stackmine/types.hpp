#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace stackmine {

enum class PostKind { question, answer };

inline std::string to_string(PostKind k) {
    return k == PostKind::question ? "question" : "answer";
}

inline PostKind post_kind_from_string(const std::string& s) {
    if (s == "question") return PostKind::question;
    if (s == "answer") return PostKind::answer;
    throw std::runtime_error("unknown post kind: " + s);
}

// One Stack Exchange question or answer. created_at is unix seconds, UTC.
struct RawPost {
    std::int64_t post_id = 0;
    PostKind kind = PostKind::question;
    std::optional<std::int64_t> parent_id;           // answers only
    std::optional<std::string> title;                // questions only
    std::string body_html;
    std::vector<std::string> tags;                   // questions only, lowercase
    int score = 0;
    std::optional<std::int64_t> accepted_answer_id;  // questions only
    std::int64_t created_at = 0;

    bool operator==(const RawPost&) const = default;
};

struct Sentence {
    std::string text;
    std::size_t begin = 0;  // byte offsets into prose_text
    std::size_t end = 0;

    bool operator==(const Sentence&) const = default;
};

struct CleanDocument {
    std::int64_t doc_id = 0;
    std::int64_t source_post_id = 0;
    std::string prose_text;
    std::vector<std::string> code_snippets;
    std::vector<Sentence> sentences;
    std::vector<std::string> tokens;

    bool operator==(const CleanDocument&) const = default;
};

// ---- UTC time helpers (no locale, no timezone database) ----

namespace detail {
// days since 1970-01-01 for a civil date (Hinnant's algorithm)
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned doe = static_cast<unsigned>(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}
}  // namespace detail

// Parses "YYYY-MM-DD[THH:MM[:SS[.fff]]][Z]" or "YYYY-MM" as UTC seconds.
inline std::int64_t parse_utc(const std::string& s) {
    int y = 0;
    unsigned mo = 1, d = 1, h = 0, mi = 0, se = 0;
    int n = std::sscanf(s.c_str(), "%d-%u-%uT%u:%u:%u", &y, &mo, &d, &h, &mi, &se);
    if (n < 1) throw std::runtime_error("bad timestamp: " + s);
    if (n == 1 && s.size() > 4) {
        // "YYYY-MM"
        if (std::sscanf(s.c_str(), "%d-%u", &y, &mo) != 2)
            throw std::runtime_error("bad timestamp: " + s);
    }
    return detail::days_from_civil(y, mo, d) * 86400 +
           static_cast<std::int64_t>(h) * 3600 + mi * 60 + se;
}

inline std::string format_utc(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y;
    unsigned mo, d;
    detail::civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, mo, d,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// ---- JSON (one object per line in the corpus stores) ----

inline void to_json(nlohmann::json& j, const RawPost& p) {
    j = nlohmann::json{{"post_id", p.post_id},
                       {"kind", to_string(p.kind)},
                       {"body_html", p.body_html},
                       {"score", p.score},
                       {"created_at", format_utc(p.created_at)}};
    if (p.parent_id) j["parent_id"] = *p.parent_id;
    if (p.title) j["title"] = *p.title;
    if (p.kind == PostKind::question) j["tags"] = p.tags;
    if (p.accepted_answer_id) j["accepted_answer_id"] = *p.accepted_answer_id;
}

inline void from_json(const nlohmann::json& j, RawPost& p) {
    p.post_id = j.at("post_id").get<std::int64_t>();
    p.kind = post_kind_from_string(j.at("kind").get<std::string>());
    p.body_html = j.at("body_html").get<std::string>();
    p.score = j.at("score").get<int>();
    p.created_at = parse_utc(j.at("created_at").get<std::string>());
    p.parent_id.reset();
    p.title.reset();
    p.accepted_answer_id.reset();
    p.tags.clear();
    if (j.contains("parent_id")) p.parent_id = j["parent_id"].get<std::int64_t>();
    if (j.contains("title")) p.title = j["title"].get<std::string>();
    if (j.contains("tags")) p.tags = j["tags"].get<std::vector<std::string>>();
    if (j.contains("accepted_answer_id"))
        p.accepted_answer_id = j["accepted_answer_id"].get<std::int64_t>();
}

inline void to_json(nlohmann::json& j, const Sentence& s) {
    j = nlohmann::json::array({s.text, s.begin, s.end});
}

inline void from_json(const nlohmann::json& j, Sentence& s) {
    s.text = j.at(0).get<std::string>();
    s.begin = j.at(1).get<std::size_t>();
    s.end = j.at(2).get<std::size_t>();
}

inline void to_json(nlohmann::json& j, const CleanDocument& d) {
    j = nlohmann::json{{"doc_id", d.doc_id},
                       {"source_post_id", d.source_post_id},
                       {"prose_text", d.prose_text},
                       {"code_snippets", d.code_snippets},
                       {"sentences", d.sentences},
                       {"tokens", d.tokens}};
}

inline void from_json(const nlohmann::json& j, CleanDocument& d) {
    d.doc_id = j.at("doc_id").get<std::int64_t>();
    d.source_post_id = j.at("source_post_id").get<std::int64_t>();
    d.prose_text = j.at("prose_text").get<std::string>();
    d.code_snippets = j.at("code_snippets").get<std::vector<std::string>>();
    d.sentences = j.at("sentences").get<std::vector<Sentence>>();
    d.tokens = j.at("tokens").get<std::vector<std::string>>();
}

}  // namespace stackmine
