#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "matrix.hpp"
#include "rng.hpp"
#include "tokens.hpp"
#include "types.hpp"

namespace stackmine {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

// Fixed hash constants: the same token lands in the same bucket with the same
// sign on every platform and run.
inline std::size_t hash_bucket(std::string_view term, std::size_t dim) {
    return static_cast<std::size_t>(fnv1a64(term) % dim);
}

inline double hash_sign(std::string_view term) {
    std::uint64_t h = fnv1a64(term);
    return (splitmix64(h) & 1ULL) ? 1.0 : -1.0;
}

// tf-idf with feature hashing; idf = ln((1+N)/(1+df)) + 1, rows L2-normalized.
// Empty token lists produce all-zero rows (reported via zero_rows).
inline EmbeddingMatrix hashed_tfidf_embed(
    const std::vector<std::vector<std::string>>& token_lists, std::size_t dim) {
    if (dim < 16) throw std::invalid_argument("hashed embedder requires dim >= 16");
    const std::size_t n = token_lists.size();
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& tokens : token_lists) {
        std::unordered_map<std::string, std::size_t> seen;
        for (const auto& t : tokens) seen[t] += 1;
        for (const auto& [t, _] : seen) df[t] += 1;
    }
    EmbeddingMatrix e;
    e.m = Matrix(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        std::unordered_map<std::string, std::size_t> tf;
        for (const auto& t : token_lists[i]) tf[t] += 1;
        auto row = e.m.row(i);
        for (const auto& [term, count] : tf) {
            double idf =
                std::log((1.0 + static_cast<double>(n)) /
                         (1.0 + static_cast<double>(df[term]))) + 1.0;
            row[hash_bucket(term, dim)] +=
                hash_sign(term) * static_cast<double>(count) * idf;
        }
        double norm = l2_norm(row);
        if (norm == 0.0) {
            e.zero_rows.push_back(i);
        } else {
            for (double& v : row) v /= norm;
        }
    }
    return e;
}

enum class EmbedderKind { hashed_tfidf, precomputed_file, remote_http };

inline std::string to_string(EmbedderKind k) {
    switch (k) {
        case EmbedderKind::hashed_tfidf: return "hashed";
        case EmbedderKind::precomputed_file: return "file";
        case EmbedderKind::remote_http: return "remote";
    }
    return "hashed";
}

inline EmbedderKind embedder_kind_from_string(const std::string& s) {
    if (s == "hashed" || s == "hashed_tfidf") return EmbedderKind::hashed_tfidf;
    if (s == "file" || s == "precomputed_file") return EmbedderKind::precomputed_file;
    if (s == "remote" || s == "remote_http") return EmbedderKind::remote_http;
    throw std::runtime_error("unknown embedder kind: " + s);
}

struct EmbeddingProviderConfig {
    EmbedderKind kind = EmbedderKind::hashed_tfidf;
    std::size_t dim = 256;        // hashed baseline width
    std::string endpoint;        // remote_http only
    std::string vectors_path;    // precomputed_file only
    std::size_t batch_size = 32;
    int max_retries = 3;
    // test seam; defaults to a real sleep in the http client
    std::function<void(double)> sleeper;
};

// Precomputed vectors: one line per doc, "doc_id TAB v1,v2,...".
inline std::unordered_map<std::int64_t, std::vector<double>> load_precomputed_vectors(
    const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read vectors file: " + path);
    std::unordered_map<std::int64_t, std::vector<double>> out;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(ln) + ": missing TAB");
        std::int64_t id = std::strtoll(line.c_str(), nullptr, 10);
        std::vector<double> vec;
        const char* p = line.c_str() + tab + 1;
        while (*p) {
            char* end = nullptr;
            double v = std::strtod(p, &end);
            if (end == p) break;
            vec.push_back(v);
            p = (*end == ',') ? end + 1 : end;
        }
        out[id] = std::move(vec);
    }
    return out;
}

// Declared here, defined in http.hpp (keeps httplib out of numeric TUs).
std::vector<std::vector<double>> remote_embed_texts(
    const std::vector<std::string>& texts, const EmbeddingProviderConfig& cfg);

namespace detail {

inline EmbeddingMatrix embed_from_precomputed(const std::vector<CleanDocument>& docs,
                                              const EmbeddingProviderConfig& cfg) {
    auto vectors = load_precomputed_vectors(cfg.vectors_path);
    std::vector<std::int64_t> missing;
    std::size_t dim = 0;
    for (const auto& d : docs) {
        auto it = vectors.find(d.doc_id);
        if (it == vectors.end()) {
            missing.push_back(d.doc_id);
        } else if (dim == 0) {
            dim = it->second.size();
        } else if (it->second.size() != dim) {
            throw std::runtime_error("vector dimension mismatch at doc " +
                                     std::to_string(d.doc_id));
        }
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "vectors file missing " << missing.size() << " doc ids:";
        for (std::size_t i = 0; i < missing.size() && i < 16; ++i)
            msg << ' ' << missing[i];
        if (missing.size() > 16) msg << " ...";
        throw std::runtime_error(msg.str());
    }
    EmbeddingMatrix e;
    e.m = Matrix(docs.size(), dim);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& vec = vectors[docs[i].doc_id];
        std::copy(vec.begin(), vec.end(), e.m.row(i).begin());
        if (l2_norm(e.m.row(i)) == 0.0) e.zero_rows.push_back(i);
    }
    return e;
}

inline EmbeddingMatrix embed_remote(const std::vector<CleanDocument>& docs,
                                    const EmbeddingProviderConfig& cfg) {
    EmbeddingMatrix e;
    std::size_t dim = 0;
    std::vector<std::vector<double>> rows;
    rows.reserve(docs.size());
    for (std::size_t start = 0; start < docs.size(); start += cfg.batch_size) {
        std::size_t stop = std::min(docs.size(), start + cfg.batch_size);
        std::vector<std::string> texts;
        for (std::size_t i = start; i < stop; ++i)
            texts.push_back(docs[i].prose_text);
        std::vector<std::vector<double>> vectors;
        try {
            vectors = remote_embed_texts(texts, cfg);
        } catch (const std::exception& ex) {
            throw std::runtime_error("remote embedding failed at batch " +
                                     std::to_string(start / cfg.batch_size) + ": " +
                                     ex.what());
        }
        if (vectors.size() != texts.size())
            throw std::runtime_error("remote returned " + std::to_string(vectors.size()) +
                                     " vectors for batch starting at doc " +
                                     std::to_string(start));
        for (auto& v : vectors) {
            if (dim == 0) dim = v.size();
            if (v.size() != dim)
                throw std::runtime_error("remote vector dimension changed in batch " +
                                         std::to_string(start / cfg.batch_size));
            rows.push_back(std::move(v));
        }
    }
    e.m = Matrix(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), e.m.row(i).begin());
        if (l2_norm(e.m.row(i)) == 0.0) e.zero_rows.push_back(i);
    }
    return e;
}

}  // namespace detail

// One row per document, doc_id order. Deterministic for the hashed and file
// providers. The hashed baseline embeds normalized tokens; remote providers
// receive the natural prose text.
inline EmbeddingMatrix embed_corpus(const std::vector<CleanDocument>& docs,
                                    const EmbeddingProviderConfig& cfg) {
    switch (cfg.kind) {
        case EmbedderKind::hashed_tfidf: {
            std::vector<std::vector<std::string>> token_lists;
            token_lists.reserve(docs.size());
            for (const auto& d : docs) token_lists.push_back(d.tokens);
            return hashed_tfidf_embed(token_lists, cfg.dim);
        }
        case EmbedderKind::precomputed_file:
            return detail::embed_from_precomputed(docs, cfg);
        case EmbedderKind::remote_http:
            if (cfg.endpoint.empty())
                throw std::runtime_error("remote embedder requires an endpoint");
            return detail::embed_remote(docs, cfg);
    }
    throw std::logic_error("unreachable embedder kind");
}

// Embeds free-standing texts (summary sentences). The file provider has no
// vectors for arbitrary sentences, so it falls back to the hashed baseline.
inline EmbeddingMatrix embed_texts(const std::vector<std::string>& texts,
                                   const EmbeddingProviderConfig& cfg,
                                   const TextResources& res) {
    if (cfg.kind == EmbedderKind::remote_http && !cfg.endpoint.empty()) {
        auto vectors = remote_embed_texts(texts, cfg);
        if (vectors.size() != texts.size())
            throw std::runtime_error("remote returned wrong vector count for sentences");
        std::size_t dim = vectors.empty() ? cfg.dim : vectors[0].size();
        EmbeddingMatrix e;
        e.m = Matrix(vectors.size(), dim);
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (vectors[i].size() != dim)
                throw std::runtime_error("remote sentence vector dimension mismatch");
            std::copy(vectors[i].begin(), vectors[i].end(), e.m.row(i).begin());
            if (l2_norm(e.m.row(i)) == 0.0) e.zero_rows.push_back(i);
        }
        return e;
    }
    std::vector<std::vector<std::string>> token_lists;
    token_lists.reserve(texts.size());
    for (const auto& t : texts) token_lists.push_back(normalize_tokens(t, res));
    return hashed_tfidf_embed(token_lists, cfg.dim);
}

}  // namespace stackmine

#include "http.hpp"  // defines remote_embed_texts
