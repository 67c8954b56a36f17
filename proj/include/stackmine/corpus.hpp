#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "types.hpp"

namespace stackmine {

// One JSON object per line, UTF-8. Round-trips every field losslessly.
template <typename Record>
void save_ndjson(const std::vector<Record>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const Record& r : records) {
        nlohmann::json j = r;
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

template <typename Record>
std::vector<Record> load_ndjson(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<Record> out;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line).get<Record>());
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(ln) + ": " + e.what());
        }
    }
    return out;
}

struct DateWindow {
    std::int64_t from = 0;    // inclusive, unix seconds UTC
    std::int64_t to = 0;      // inclusive
    bool contains(std::int64_t t) const { return t >= from && t <= to; }
};

struct FilterStats {
    std::size_t questions_kept = 0;
    std::size_t questions_dropped = 0;
    std::size_t answers_kept = 0;
    std::size_t orphan_answers_dropped = 0;
};

// Keeps questions carrying `tag` inside the window, and an answer iff its
// parent question is kept. Input ordering is preserved.
inline std::vector<RawPost> filter_corpus(const std::vector<RawPost>& posts,
                                          const std::string& tag,
                                          const DateWindow& window,
                                          FilterStats* stats = nullptr) {
    FilterStats local;
    FilterStats& st = stats ? *stats : local;
    std::unordered_set<std::int64_t> kept_questions;
    for (const RawPost& p : posts) {
        if (p.kind != PostKind::question) continue;
        bool tagged = false;
        for (const std::string& t : p.tags)
            if (t == tag) {
                tagged = true;
                break;
            }
        if (tagged && window.contains(p.created_at))
            kept_questions.insert(p.post_id);
    }
    std::vector<RawPost> out;
    for (const RawPost& p : posts) {
        if (p.kind == PostKind::question) {
            if (kept_questions.count(p.post_id)) {
                out.push_back(p);
                ++st.questions_kept;
            } else {
                ++st.questions_dropped;
            }
        } else {
            if (p.parent_id && kept_questions.count(*p.parent_id)) {
                out.push_back(p);
                ++st.answers_kept;
            } else {
                ++st.orphan_answers_dropped;
            }
        }
    }
    return out;
}

// Groups a corpus for summary assembly: question lookup plus per-question
// answer lists (corpus order preserved).
struct CorpusIndex {
    std::unordered_map<std::int64_t, const RawPost*> questions;
    std::unordered_map<std::int64_t, std::vector<const RawPost*>> answers_by_parent;

    explicit CorpusIndex(const std::vector<RawPost>& posts) {
        for (const RawPost& p : posts) {
            if (p.kind == PostKind::question)
                questions.emplace(p.post_id, &p);
            else if (p.parent_id)
                answers_by_parent[*p.parent_id].push_back(&p);
        }
    }
};

}  // namespace stackmine
