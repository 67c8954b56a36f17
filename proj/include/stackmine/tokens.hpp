#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "porter.hpp"

namespace stackmine {

struct TextResources {
    std::unordered_set<std::string> stopwords;
    std::unordered_map<std::string, std::string> lemmas;

    // dir must contain stopwords.txt (one word per line) and lemmas.tsv
    // (inflected TAB lemma), both UTF-8.
    static TextResources load(const std::string& dir) {
        TextResources r;
        {
            std::ifstream in(dir + "/stopwords.txt");
            if (!in) throw std::runtime_error("cannot read " + dir + "/stopwords.txt");
            std::string w;
            while (std::getline(in, w)) {
                while (!w.empty() && (w.back() == '\r' || w.back() == ' ')) w.pop_back();
                if (!w.empty()) r.stopwords.insert(w);
            }
        }
        {
            std::ifstream in(dir + "/lemmas.tsv");
            if (!in) throw std::runtime_error("cannot read " + dir + "/lemmas.tsv");
            std::string line;
            while (std::getline(in, line)) {
                while (!line.empty() && line.back() == '\r') line.pop_back();
                auto tab = line.find('\t');
                if (tab == std::string::npos || tab == 0) continue;
                r.lemmas.emplace(line.substr(0, tab), line.substr(tab + 1));
            }
        }
        return r;
    }
};

// Remembers which readable pre-stem form produced each stem, so topic labels
// can show "gradle" rather than "gradl".
class SurfaceMap {
public:
    void note(const std::string& stem, const std::string& surface) {
        counts_[stem][surface] += 1;
    }

    std::string surface_of(const std::string& stem) const {
        auto it = counts_.find(stem);
        if (it == counts_.end() || it->second.empty()) return stem;
        const std::string* best = nullptr;
        std::int64_t best_n = -1;
        for (const auto& [form, n] : it->second) {
            if (n > best_n || (n == best_n && form < *best)) {
                best = &form;
                best_n = n;
            }
        }
        return *best;
    }

    void merge(const SurfaceMap& other) {
        for (const auto& [stem, forms] : other.counts_)
            for (const auto& [form, n] : forms) counts_[stem][form] += n;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        for (const auto& [stem, forms] : counts_)
            for (const auto& [form, n] : forms)
                out << stem << '\t' << form << '\t' << n << '\n';
    }

    static SurfaceMap load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + path);
        SurfaceMap m;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string stem, form;
            std::int64_t n = 0;
            if (std::getline(row, stem, '\t') && std::getline(row, form, '\t') &&
                (row >> n))
                m.counts_[stem][form] += n;
        }
        return m;
    }

private:
    // ordered maps keep persistence and tie-breaking deterministic
    std::map<std::string, std::map<std::string, std::int64_t>> counts_;
};

namespace detail {

inline bool all_alpha(std::string_view s) {
    for (char c : s)
        if (c < 'a' || c > 'z') return false;
    return !s.empty();
}

inline bool has_digit(std::string_view s) {
    for (char c : s)
        if (c >= '0' && c <= '9') return true;
    return false;
}

}  // namespace detail

// Normalization pipeline: lowercase, tokenize on non-alphanumeric boundaries,
// drop stopwords, lemmatize (identity when absent), Porter-stem, drop tokens
// with digits or shorter than two characters. The filter/lemma/stem cycle runs
// to a fixed point so emitted tokens are stable under re-normalization (a stem
// can itself be a stopword or an inflected form, e.g. "doing" -> "do").
inline std::vector<std::string> normalize_tokens(std::string_view prose,
                                                 const TextResources& res,
                                                 SurfaceMap* surfaces = nullptr) {
    std::vector<std::string> out;
    std::string raw;
    auto flush = [&]() {
        if (raw.empty()) return;
        std::string cur = std::move(raw);
        raw.clear();
        std::string first_surface;
        for (int iter = 0; iter < 6; ++iter) {
            if (res.stopwords.count(cur)) return;
            auto lem = res.lemmas.find(cur);
            const std::string& base = lem == res.lemmas.end() ? cur : lem->second;
            if (iter == 0) first_surface = base;
            std::string stemmed =
                detail::all_alpha(base) ? porter_stem(base) : base;
            if (detail::has_digit(stemmed) || stemmed.size() < 2) return;
            if (stemmed == cur) {
                if (surfaces) surfaces->note(stemmed, first_surface);
                out.push_back(std::move(stemmed));
                return;
            }
            cur = std::move(stemmed);
        }
        // no fixed point within the iteration budget; drop the token
    };
    for (char ch : prose) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            raw += static_cast<char>(std::tolower(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

}  // namespace stackmine
