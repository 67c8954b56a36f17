#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "embed.hpp"
#include "html_split.hpp"
#include "matrix.hpp"
#include "rng.hpp"
#include "sentences.hpp"
#include "topics.hpp"
#include "types.hpp"

namespace stackmine {

struct SummarizerParams {
    int q_min = 3;                    // minimum question score
    int a_min = 2;                    // minimum answer score when not accepted
    std::size_t max_pairs = 5;
    std::size_t snippet_byte_cap = 2048;
    std::uint64_t seed = 0;
};

struct ProblemSolutionPair {
    std::int32_t topic_id = 0;
    std::int64_t question_id = 0;
    int question_score = 0;
    std::vector<std::string> problem_summary;  // verbatim sentences, source order
    std::int64_t answer_id = 0;
    int answer_score = 0;
    bool answer_accepted = false;
    std::vector<std::string> solution_summary;
    std::vector<std::string> code_snippets;    // question's, then answer's
};

struct TopicReport {
    Topic topic;
    std::vector<ProblemSolutionPair> pairs;  // question_score desc, id asc
    std::size_t skipped_questions = 0;       // no acceptable answer
};

inline void to_json(nlohmann::json& j, const ProblemSolutionPair& p) {
    j = nlohmann::json{{"topic_id", p.topic_id},
                       {"question_id", p.question_id},
                       {"question_score", p.question_score},
                       {"problem_summary", p.problem_summary},
                       {"answer_id", p.answer_id},
                       {"answer_score", p.answer_score},
                       {"answer_accepted", p.answer_accepted},
                       {"solution_summary", p.solution_summary},
                       {"code_snippets", p.code_snippets}};
}

inline void from_json(const nlohmann::json& j, ProblemSolutionPair& p) {
    p.topic_id = j.at("topic_id").get<std::int32_t>();
    p.question_id = j.at("question_id").get<std::int64_t>();
    p.question_score = j.at("question_score").get<int>();
    p.problem_summary = j.at("problem_summary").get<std::vector<std::string>>();
    p.answer_id = j.at("answer_id").get<std::int64_t>();
    p.answer_score = j.at("answer_score").get<int>();
    p.answer_accepted = j.at("answer_accepted").get<bool>();
    p.solution_summary = j.at("solution_summary").get<std::vector<std::string>>();
    p.code_snippets = j.at("code_snippets").get<std::vector<std::string>>();
}

inline void to_json(nlohmann::json& j, const TopicReport& r) {
    j = nlohmann::json{{"topic", r.topic},
                       {"pairs", r.pairs},
                       {"skipped_questions", r.skipped_questions}};
}

inline void from_json(const nlohmann::json& j, TopicReport& r) {
    r.topic = j.at("topic").get<Topic>();
    r.pairs = j.at("pairs").get<std::vector<ProblemSolutionPair>>();
    r.skipped_questions = j.at("skipped_questions").get<std::size_t>();
}

// Questions of the topic scoring at least q_min, best first (ties by lower
// id), truncated to max_pairs.
inline std::vector<const RawPost*> select_questions(const Topic& topic,
                                                    const std::vector<CleanDocument>& docs,
                                                    const CorpusIndex& index,
                                                    int q_min, std::size_t max_pairs) {
    std::vector<const RawPost*> out;
    for (std::int64_t doc_id : topic.member_doc_ids) {
        if (doc_id < 0 || static_cast<std::size_t>(doc_id) >= docs.size()) continue;
        auto it = index.questions.find(docs[static_cast<std::size_t>(doc_id)].source_post_id);
        if (it == index.questions.end()) continue;
        if (it->second->score >= q_min) out.push_back(it->second);
    }
    std::sort(out.begin(), out.end(), [](const RawPost* a, const RawPost* b) {
        if (a->score != b->score) return a->score > b->score;
        return a->post_id < b->post_id;
    });
    if (out.size() > max_pairs) out.resize(max_pairs);
    return out;
}

// The accepted answer when one exists, otherwise the highest-scoring answer
// clearing a_min (ties by lower id), otherwise nothing.
inline const RawPost* select_answer(const RawPost& question,
                                    const std::vector<const RawPost*>& answers,
                                    int a_min) {
    if (question.accepted_answer_id) {
        for (const RawPost* a : answers)
            if (a->post_id == *question.accepted_answer_id) return a;
    }
    const RawPost* best = nullptr;
    for (const RawPost* a : answers) {
        if (a->score < a_min) continue;
        if (!best || a->score > best->score ||
            (a->score == best->score && a->post_id < best->post_id))
            best = a;
    }
    return best;
}

namespace summarize_detail {

// Seeded k-means++ over sentence embeddings; ties broken by lowest index.
inline std::vector<std::size_t> kmeans_medoid_sentences(const Matrix& emb,
                                                        const std::vector<std::size_t>& usable,
                                                        std::size_t k, Pcg32& rng) {
    const std::size_t m = usable.size();
    const std::size_t d = emb.dim;
    std::vector<std::size_t> centers;  // indices into `usable`
    std::vector<double> min_d2(m, std::numeric_limits<double>::infinity());
    // k-means++ seeding
    centers.push_back(rng.next_below(static_cast<std::uint32_t>(m)));
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double d2 = squared_distance(emb.row(usable[i]), emb.row(usable[centers.back()]));
            min_d2[i] = std::min(min_d2[i], d2);
            total += min_d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double r = rng.next_double() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                acc += min_d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.next_below(static_cast<std::uint32_t>(m));
        }
        centers.push_back(pick);
    }

    std::vector<double> centroids(k * d);
    for (std::size_t c = 0; c < k; ++c) {
        auto row = emb.row(usable[centers[c]]);
        std::copy(row.begin(), row.end(), centroids.begin() + static_cast<std::ptrdiff_t>(c * d));
    }
    std::vector<std::size_t> assign(m, 0);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                double d2 = squared_distance(
                    emb.row(usable[i]),
                    std::span<const double>(centroids.data() + c * d, d));
                if (d2 < best_d) {
                    best_d = d2;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        std::vector<double> sums(k * d, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < m; ++i) {
            auto row = emb.row(usable[i]);
            for (std::size_t c = 0; c < d; ++c) sums[assign[i] * d + c] += row[c];
            ++counts[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            for (std::size_t x = 0; x < d; ++x)
                centroids[c * d + x] = sums[c * d + x] / static_cast<double>(counts[c]);
        }
    }

    // one representative per cluster: the member nearest its centroid
    std::set<std::size_t> picked;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t best = m;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (assign[i] != c) continue;
            double d2 = squared_distance(
                emb.row(usable[i]),
                std::span<const double>(centroids.data() + c * d, d));
            if (d2 < best_d || (d2 == best_d && i < best)) {
                best_d = d2;
                best = i;
            }
        }
        if (best < m) picked.insert(usable[best]);
    }
    return {picked.begin(), picked.end()};  // ascending = original order
}

}  // namespace summarize_detail

// Picks k representative sentences (cluster-medoid selection over the given
// embeddings) and returns their indices in original order. Zero-vector
// sentences are never representatives unless n <= k returns everything.
inline std::vector<std::size_t> extractive_summarize(const Matrix& sentence_embeddings,
                                                     std::size_t k,
                                                     std::uint64_t seed) {
    const std::size_t n = sentence_embeddings.n_rows;
    if (k == 0) k = 1;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    if (n <= k) return all;
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < n; ++i)
        if (l2_norm(sentence_embeddings.row(i)) > 0.0) usable.push_back(i);
    if (usable.size() <= k) return usable;
    Pcg32 rng(seed, 23);
    return summarize_detail::kmeans_medoid_sentences(sentence_embeddings, usable, k, rng);
}

inline std::size_t default_summary_length(std::size_t sentence_count) {
    if (sentence_count == 0) return 1;
    auto by_ratio = static_cast<std::size_t>(
        std::ceil(0.3 * static_cast<double>(sentence_count)));
    return std::min<std::size_t>(3, std::max<std::size_t>(1, by_ratio));
}

namespace summarize_detail {

inline std::vector<std::string> summarize_sentences(const std::vector<Sentence>& sentences,
                                                    const EmbeddingProviderConfig& provider,
                                                    const TextResources& res,
                                                    std::uint64_t seed) {
    std::vector<std::string> texts;
    texts.reserve(sentences.size());
    for (const Sentence& s : sentences) texts.push_back(s.text);
    if (texts.empty()) return {};
    std::size_t k = default_summary_length(texts.size());
    EmbeddingMatrix emb = embed_texts(texts, provider, res);
    std::vector<std::size_t> idx = extractive_summarize(emb.m, k, seed);
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(texts[i]);
    return out;
}

inline void append_snippets(std::vector<std::string>& out,
                            const std::vector<std::string>& snippets,
                            std::size_t byte_cap) {
    for (const std::string& s : snippets) {
        if (s.size() <= byte_cap)
            out.push_back(s);
        else
            out.push_back(s.substr(0, byte_cap));
    }
}

}  // namespace summarize_detail

// Table-style report for one topic: each qualifying question paired with its
// chosen answer, both summarized extractively, code carried along.
inline TopicReport assemble_report(const Topic& topic,
                                   const std::vector<CleanDocument>& docs,
                                   const CorpusIndex& index,
                                   const EmbeddingProviderConfig& provider,
                                   const TextResources& res,
                                   const SummarizerParams& params) {
    TopicReport report;
    report.topic = topic;
    static const std::vector<const RawPost*> kNoAnswers;
    auto questions = select_questions(topic, docs, index, params.q_min, params.max_pairs);
    for (const RawPost* q : questions) {
        auto ans_it = index.answers_by_parent.find(q->post_id);
        const auto& answers = ans_it == index.answers_by_parent.end() ? kNoAnswers
                                                                      : ans_it->second;
        const RawPost* answer = select_answer(*q, answers, params.a_min);
        if (!answer) {
            ++report.skipped_questions;
            continue;
        }
        ProblemSolutionPair pair;
        pair.topic_id = topic.topic_id;
        pair.question_id = q->post_id;
        pair.question_score = q->score;
        pair.answer_id = answer->post_id;
        pair.answer_score = answer->score;
        pair.answer_accepted =
            q->accepted_answer_id && *q->accepted_answer_id == answer->post_id;

        // the question's CleanDocument already carries title-led sentences
        const CleanDocument* qdoc = nullptr;
        for (std::int64_t doc_id : topic.member_doc_ids) {
            const auto& d = docs[static_cast<std::size_t>(doc_id)];
            if (d.source_post_id == q->post_id) {
                qdoc = &d;
                break;
            }
        }
        std::uint64_t qseed = params.seed ^ splitmix_of(q->post_id);
        if (qdoc) {
            pair.problem_summary =
                summarize_detail::summarize_sentences(qdoc->sentences, provider, res, qseed);
            summarize_detail::append_snippets(pair.code_snippets, qdoc->code_snippets,
                                              params.snippet_byte_cap);
        }
        SplitBody asplit = split_html(answer->body_html);
        auto asentences = segment_sentences(asplit.prose_text);
        std::uint64_t aseed = params.seed ^ splitmix_of(answer->post_id);
        pair.solution_summary =
            summarize_detail::summarize_sentences(asentences, provider, res, aseed);
        summarize_detail::append_snippets(pair.code_snippets, asplit.code_snippets,
                                          params.snippet_byte_cap);
        report.pairs.push_back(std::move(pair));
    }
    return report;
}

}  // namespace stackmine
