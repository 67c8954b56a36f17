#pragma once

// Test-only oracles, written independently of the library implementations
// they check: brute-force c-TF-IDF, adjusted Rand index, Kruskal MST, and
// k-NN label purity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <stackmine/matrix.hpp>

namespace oracle {

// ---- c-TF-IDF, straight from the definition ----

struct CtfidfInput {
    // class -> bag of tokens
    std::vector<std::vector<std::string>> classes;
};

inline std::vector<std::map<std::string, double>> ctfidf_brute(const CtfidfInput& in) {
    std::size_t n_classes = in.classes.size();
    std::map<std::string, std::int64_t> f;
    std::int64_t total = 0;
    for (const auto& cls : in.classes)
        for (const auto& t : cls) {
            f[t] += 1;
            ++total;
        }
    double a = n_classes == 0 ? 0.0 : double(total) / double(n_classes);
    std::vector<std::map<std::string, double>> out(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::map<std::string, std::int64_t> tf;
        for (const auto& t : in.classes[c]) tf[t] += 1;
        for (const auto& [t, cnt] : tf)
            out[c][t] = double(cnt) * std::log(1.0 + a / double(f[t]));
    }
    return out;
}

// ---- adjusted Rand index over two labelings (any integer labels) ----

inline double adjusted_rand_index(const std::vector<std::int32_t>& x,
                                  const std::vector<std::int32_t>& y) {
    auto comb2 = [](double n) { return n * (n - 1.0) / 2.0; };
    std::map<std::int32_t, std::map<std::int32_t, double>> table;
    std::map<std::int32_t, double> rows, cols;
    for (std::size_t i = 0; i < x.size(); ++i) {
        table[x[i]][y[i]] += 1;
        rows[x[i]] += 1;
        cols[y[i]] += 1;
    }
    double sum_cells = 0, sum_rows = 0, sum_cols = 0;
    for (const auto& [_, row] : table)
        for (const auto& [_2, v] : row) sum_cells += comb2(v);
    for (const auto& [_, v] : rows) sum_rows += comb2(v);
    for (const auto& [_, v] : cols) sum_cols += comb2(v);
    double n2 = comb2(double(x.size()));
    double expected = sum_rows * sum_cols / n2;
    double maximum = (sum_rows + sum_cols) / 2.0;
    if (maximum == expected) return 1.0;
    return (sum_cells - expected) / (maximum - expected);
}

// ---- Kruskal over an explicit weighted edge list, lexicographic tie order ----

struct Edge {
    std::size_t a, b;
    double w;
};

inline std::vector<double> kruskal_mst_weights(std::size_t n, std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        auto xa = std::minmax(x.a, x.b), ya = std::minmax(y.a, y.b);
        return std::tie(x.w, xa.first, xa.second) < std::tie(y.w, ya.first, ya.second);
    });
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::vector<double> weights;
    for (const Edge& e : edges) {
        std::size_t ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        parent[ra] = rb;
        weights.push_back(e.w);
        if (weights.size() == n - 1) break;
    }
    std::sort(weights.begin(), weights.end());
    return weights;
}

// ---- k-NN label purity (k nearest by Euclidean, self excluded) ----

inline double knn_label_purity(const stackmine::Matrix& X,
                               const std::vector<std::int32_t>& labels, std::size_t k) {
    const std::size_t n = X.n_rows;
    double total = 0.0;
    std::vector<std::pair<double, std::size_t>> d(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d[m++] = {stackmine::euclidean(X.row(i), X.row(j)), j};
        std::partial_sort(d.begin(), d.begin() + std::ptrdiff_t(k), d.end());
        std::size_t same = 0;
        for (std::size_t c = 0; c < k; ++c)
            if (labels[d[c].second] == labels[i]) ++same;
        total += double(same) / double(k);
    }
    return total / double(n);
}

}  // namespace oracle
