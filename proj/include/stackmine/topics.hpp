#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctfidf.hpp"
#include "matrix.hpp"
#include "tokens.hpp"
#include "types.hpp"

namespace stackmine {

struct Topic {
    std::int32_t topic_id = 0;   // 0 = largest cluster
    std::vector<std::int64_t> member_doc_ids;
    std::size_t size = 0;
    std::vector<TermWeight> top_terms;  // descending weight
    std::string label;                  // top-4 surfaced terms joined by '_'
};

inline void to_json(nlohmann::json& j, const TermWeight& t) {
    j = nlohmann::json::array({t.term, t.weight});
}

inline void from_json(const nlohmann::json& j, TermWeight& t) {
    t.term = j.at(0).get<std::string>();
    t.weight = j.at(1).get<double>();
}

inline void to_json(nlohmann::json& j, const Topic& t) {
    j = nlohmann::json{{"topic_id", t.topic_id},
                       {"member_doc_ids", t.member_doc_ids},
                       {"size", t.size},
                       {"top_terms", t.top_terms},
                       {"label", t.label}};
}

inline void from_json(const nlohmann::json& j, Topic& t) {
    t.topic_id = j.at("topic_id").get<std::int32_t>();
    t.member_doc_ids = j.at("member_doc_ids").get<std::vector<std::int64_t>>();
    t.size = j.at("size").get<std::size_t>();
    t.top_terms = j.at("top_terms").get<std::vector<TermWeight>>();
    t.label = j.at("label").get<std::string>();
}

// Labels read as surface words ("gradle"), while weights stay attached to the
// underlying stem vocabulary.
inline std::string label_from_terms(const std::vector<TermWeight>& terms,
                                    const SurfaceMap& surfaces,
                                    std::size_t arity = 4) {
    std::string label;
    for (std::size_t i = 0; i < terms.size() && i < arity; ++i) {
        if (i) label += '_';
        label += surfaces.surface_of(terms[i].term);
    }
    return label;
}

// Cluster labels arrive already numbered by decreasing size, so cluster c
// becomes topic c directly (topic 0 = largest).
inline std::vector<Topic> build_topics(const std::vector<std::int32_t>& labels,
                                       const std::vector<CleanDocument>& docs,
                                       std::size_t cluster_count,
                                       const SurfaceMap& surfaces,
                                       std::size_t terms_per_topic = 10) {
    ClassTermCounts counts = build_class_documents(labels, docs, cluster_count);
    auto weights = c_tf_idf(counts);
    std::vector<Topic> topics(cluster_count);
    for (std::size_t c = 0; c < cluster_count; ++c) {
        Topic& t = topics[c];
        t.topic_id = static_cast<std::int32_t>(c);
        for (std::size_t i = 0; i < docs.size(); ++i)
            if (labels[i] == static_cast<std::int32_t>(c))
                t.member_doc_ids.push_back(docs[i].doc_id);
        t.size = t.member_doc_ids.size();
        t.top_terms = weights[c];
        if (t.top_terms.size() > terms_per_topic) t.top_terms.resize(terms_per_topic);
        t.label = label_from_terms(t.top_terms, surfaces);
    }
    return topics;
}

struct WordScoreRow {
    std::int32_t topic_id = 0;
    std::string label;
    std::size_t rank = 0;   // 1-based within the topic
    std::string term;       // surface form
    double weight = 0.0;
};

// Figure-style export: the top_k terms of the top_n largest topics, raw
// c-TF-IDF weights (higher = more characteristic of the topic).
inline std::vector<WordScoreRow> export_word_scores(const std::vector<Topic>& topics,
                                                    const SurfaceMap& surfaces,
                                                    std::size_t top_n_topics = 12,
                                                    std::size_t top_k_terms = 5) {
    std::vector<WordScoreRow> rows;
    for (const Topic& t : topics) {
        if (static_cast<std::size_t>(t.topic_id) >= top_n_topics) continue;
        for (std::size_t r = 0; r < t.top_terms.size() && r < top_k_terms; ++r) {
            rows.push_back({t.topic_id, t.label, r + 1,
                            surfaces.surface_of(t.top_terms[r].term),
                            t.top_terms[r].weight});
        }
    }
    return rows;
}

inline void write_word_scores_csv(const std::vector<WordScoreRow>& rows,
                                  const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "topic_id,label,rank,term,weight\n";
    for (const auto& r : rows)
        out << r.topic_id << ',' << r.label << ',' << r.rank << ',' << r.term << ','
            << format_double(r.weight) << '\n';
}

inline std::vector<WordScoreRow> read_word_scores_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<WordScoreRow> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        WordScoreRow r;
        std::size_t p0 = line.find(',');
        std::size_t p1 = line.find(',', p0 + 1);
        std::size_t p2 = line.find(',', p1 + 1);
        std::size_t p3 = line.find(',', p2 + 1);
        if (p3 == std::string::npos) throw std::runtime_error(path + ": bad row");
        r.topic_id = static_cast<std::int32_t>(std::stol(line.substr(0, p0)));
        r.label = line.substr(p0 + 1, p1 - p0 - 1);
        r.rank = static_cast<std::size_t>(std::stoul(line.substr(p1 + 1, p2 - p1 - 1)));
        r.term = line.substr(p2 + 1, p3 - p2 - 1);
        r.weight = std::strtod(line.c_str() + p3 + 1, nullptr);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace stackmine
