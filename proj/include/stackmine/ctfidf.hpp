#pragma once

// Class-based TF-IDF: every cluster's members are pooled into one class
// document and term t in class c scores tf(t,c) * ln(1 + A / f(t)), where A
// is the average token count per class and f(t) the total count of t across
// classes. Natural log; zero-tf pairs are omitted.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "types.hpp"

namespace stackmine {

struct ClassTermCounts {
    std::vector<std::map<std::string, std::int64_t>> per_class;
    std::map<std::string, std::int64_t> global;  // f(t)
    double average_words_per_class = 0.0;        // A
};

// labels are row-aligned with docs; -1 (noise) is excluded. Classes without
// any tokens still count toward A's denominator.
inline ClassTermCounts build_class_documents(const std::vector<std::int32_t>& labels,
                                             const std::vector<CleanDocument>& docs,
                                             std::size_t class_count) {
    if (labels.size() != docs.size())
        throw std::invalid_argument("labels and documents are not row-aligned");
    ClassTermCounts counts;
    counts.per_class.resize(class_count);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        std::int32_t c = labels[i];
        if (c < 0) continue;
        if (static_cast<std::size_t>(c) >= class_count)
            throw std::invalid_argument("label exceeds class count");
        for (const std::string& t : docs[i].tokens) {
            counts.per_class[c][t] += 1;
            counts.global[t] += 1;
            ++total;
        }
    }
    counts.average_words_per_class =
        class_count == 0 ? 0.0
                         : static_cast<double>(total) / static_cast<double>(class_count);
    return counts;
}

struct TermWeight {
    std::string term;
    double weight = 0.0;
};

// Per-class term weights, sorted by descending weight (ties by term). Every
// emitted weight is strictly positive.
inline std::vector<std::vector<TermWeight>> c_tf_idf(const ClassTermCounts& counts) {
    std::vector<std::vector<TermWeight>> out(counts.per_class.size());
    const double a = counts.average_words_per_class;
    for (std::size_t c = 0; c < counts.per_class.size(); ++c) {
        auto& weights = out[c];
        weights.reserve(counts.per_class[c].size());
        for (const auto& [term, tf] : counts.per_class[c]) {
            if (tf <= 0) continue;
            double f = static_cast<double>(counts.global.at(term));
            double w = static_cast<double>(tf) * std::log(1.0 + a / f);
            weights.push_back({term, w});
        }
        std::sort(weights.begin(), weights.end(), [](const TermWeight& x, const TermWeight& y) {
            if (x.weight != y.weight) return x.weight > y.weight;
            return x.term < y.term;
        });
    }
    return out;
}

}  // namespace stackmine
