#pragma once

// UMAP at desk scale: exact k-NN graph, smoothed-kernel bandwidths found by
// binary search, fuzzy union symmetrization, curve parameters fit from
// min_dist, PCA initialization, and seeded edge-sampling SGD. Bit-identical
// output for identical (input, params, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"
#include "pca.hpp"
#include "rng.hpp"

namespace stackmine {

struct UmapParams {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    std::size_t dim_out = 5;      // 5 for clustering, 2 for visualization
    std::size_t n_epochs = 200;
    std::size_t negative_sample_rate = 5;
    std::uint64_t seed = 0;
};

namespace umap_detail {

constexpr double kDistanceFloor = 1e-12;
constexpr double kGradClip = 4.0;

struct NeighborGraph {
    std::size_t k = 0;
    std::vector<std::size_t> idx;   // n*k neighbor indices
    std::vector<double> dist;       // n*k distances (floored)
};

inline NeighborGraph exact_knn(const Matrix& X, std::size_t k) {
    const std::size_t n = X.n_rows;
    NeighborGraph g;
    g.k = k;
    g.idx.resize(n * k);
    g.dist.resize(n * k);
    std::vector<std::pair<double, std::size_t>> cand(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand[m++] = {std::max(euclidean(X.row(i), X.row(j)), kDistanceFloor), j};
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k),
                          cand.end());
        for (std::size_t c = 0; c < k; ++c) {
            g.dist[i * k + c] = cand[c].first;
            g.idx[i * k + c] = cand[c].second;
        }
    }
    return g;
}

// Per-point bandwidth: sigma_i such that the smoothed weights sum to
// log2(n_neighbors); rho_i is the nearest-neighbor distance.
inline void smooth_knn(const NeighborGraph& g, std::size_t n,
                       std::vector<double>& rho, std::vector<double>& sigma) {
    const std::size_t k = g.k;
    const double target = std::log2(static_cast<double>(k));
    rho.resize(n);
    sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* d = &g.dist[i * k];
        rho[i] = d[0];
        auto weight_sum = [&](double s) {
            double total = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                double gap = d[c] - rho[i];
                total += gap <= 0.0 ? 1.0 : std::exp(-gap / s);
            }
            return total;
        };
        double lo = 0.0, hi = 1.0;
        int grow = 0;
        while (weight_sum(hi) < target && grow++ < 64) hi *= 2.0;
        for (int it = 0; it < 64; ++it) {
            double mid = (lo + hi) / 2.0;
            if (weight_sum(mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        sigma[i] = std::max(hi, kDistanceFloor);
    }
}

struct EdgeList {
    std::vector<std::size_t> head;
    std::vector<std::size_t> tail;
    std::vector<double> weight;
};

// Fuzzy union a + b - ab over the directed k-NN memberships; both directions
// of every surviving edge are kept for the SGD phase.
inline EdgeList fuzzy_union(const NeighborGraph& g, std::size_t n,
                            const std::vector<double>& rho,
                            const std::vector<double>& sigma) {
    const std::size_t k = g.k;
    std::vector<std::vector<std::pair<std::size_t, double>>> directed(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c) {
            double gap = g.dist[i * k + c] - rho[i];
            double w = gap <= 0.0 ? 1.0 : std::exp(-gap / sigma[i]);
            directed[i].emplace_back(g.idx[i * k + c], w);
        }
    auto lookup = [&](std::size_t a, std::size_t b) {
        for (const auto& [j, w] : directed[a])
            if (j == b) return w;
        return 0.0;
    };
    EdgeList edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, wij] : directed[i]) {
            if (j < i && lookup(j, i) > 0.0) continue;  // handled from j's side
            double wji = lookup(j, i);
            double w = wij + wji - wij * wji;
            if (w <= 0.0) continue;
            edges.head.push_back(i);
            edges.tail.push_back(j);
            edges.weight.push_back(w);
            edges.head.push_back(j);
            edges.tail.push_back(i);
            edges.weight.push_back(w);
        }
    }
    return edges;
}

// Least-squares fit of 1/(1 + a x^(2b)) to the min_dist membership curve.
inline std::pair<double, double> fit_ab(double min_dist, double spread = 1.0) {
    constexpr int kSamples = 300;
    std::vector<double> xs(kSamples), ys(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        double x = 3.0 * spread * static_cast<double>(i) / (kSamples - 1);
        xs[i] = x;
        ys[i] = x < min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
    }
    double a = 1.0, b = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (int i = 0; i < kSamples; ++i) {
            double x = xs[i];
            if (x <= 0.0) continue;
            double t = std::pow(x, 2.0 * b);
            double f = 1.0 / (1.0 + a * t);
            double r = f - ys[i];
            double da = -t * f * f;
            double db = -2.0 * a * t * std::log(x) * f * f;
            jtj00 += da * da;
            jtj01 += da * db;
            jtj11 += db * db;
            jtr0 += da * r;
            jtr1 += db * r;
        }
        jtj00 += 1e-9;
        jtj11 += 1e-9;
        double det = jtj00 * jtj11 - jtj01 * jtj01;
        if (std::abs(det) < 1e-300) break;
        double step_a = (-jtr0 * jtj11 + jtr1 * jtj01) / det;
        double step_b = (-jtr1 * jtj00 + jtr0 * jtj01) / det;
        a += step_a;
        b += step_b;
        a = std::max(a, 1e-3);
        b = std::clamp(b, 1e-3, 4.0);
        if (std::abs(step_a) + std::abs(step_b) < 1e-12) break;
    }
    return {a, b};
}

}  // namespace umap_detail

inline ReducedEmbedding umap_reduce(const Matrix& X, const UmapParams& p) {
    using namespace umap_detail;
    const std::size_t n = X.n_rows;
    if (p.n_neighbors == 0 || n <= p.n_neighbors)
        throw std::invalid_argument("umap: need n_rows > n_neighbors");
    if (!X.all_finite()) throw std::invalid_argument("umap: non-finite input");

    NeighborGraph g = exact_knn(X, p.n_neighbors);
    std::vector<double> rho, sigma;
    smooth_knn(g, n, rho, sigma);
    EdgeList edges = fuzzy_union(g, n, rho, sigma);

    double max_w = 0.0;
    for (double w : edges.weight) max_w = std::max(max_w, w);
    // drop edges sampled less than once over the whole schedule
    if (max_w > 0.0 && p.n_epochs > 0) {
        double cutoff = max_w / static_cast<double>(p.n_epochs);
        EdgeList kept;
        for (std::size_t e = 0; e < edges.weight.size(); ++e) {
            if (edges.weight[e] < cutoff) continue;
            kept.head.push_back(edges.head[e]);
            kept.tail.push_back(edges.tail[e]);
            kept.weight.push_back(edges.weight[e]);
        }
        edges = std::move(kept);
    }

    // PCA initialization scaled to a +-10 box with a whisper of seeded noise
    ReducedEmbedding out;
    out.seed = p.seed;
    PcaModel init_model = pca_fit(X, std::min(p.dim_out, std::min(n, X.dim)));
    Matrix emb = pca_transform(init_model, X);
    if (emb.dim < p.dim_out) {
        Matrix wide(n, p.dim_out);
        for (std::size_t i = 0; i < n; ++i)
            std::copy(emb.row(i).begin(), emb.row(i).end(), wide.row(i).begin());
        emb = std::move(wide);
    }
    double max_abs = 0.0;
    for (double v : emb.values) max_abs = std::max(max_abs, std::abs(v));
    double expand = max_abs > 0.0 ? 10.0 / max_abs : 1.0;
    Pcg32 jitter(p.seed, 7);
    for (double& v : emb.values) v = v * expand + 1e-4 * jitter.next_normal();

    auto [a, b] = fit_ab(p.min_dist);

    const std::size_t n_edges = edges.weight.size();
    std::vector<double> epochs_per_sample(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e)
        epochs_per_sample[e] = max_w / edges.weight[e];
    std::vector<double> next_sample = epochs_per_sample;
    std::vector<double> eps_neg(n_edges);
    std::vector<double> next_neg(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) {
        eps_neg[e] = epochs_per_sample[e] /
                     static_cast<double>(std::max<std::size_t>(p.negative_sample_rate, 1));
        next_neg[e] = eps_neg[e];
    }

    Pcg32 rng(p.seed, 11);
    const std::size_t d = p.dim_out;
    auto clip = [](double v) { return std::clamp(v, -kGradClip, kGradClip); };

    for (std::size_t epoch = 1; epoch <= p.n_epochs; ++epoch) {
        double alpha = 1.0 - static_cast<double>(epoch - 1) /
                                 static_cast<double>(p.n_epochs);
        for (std::size_t e = 0; e < n_edges; ++e) {
            if (next_sample[e] > static_cast<double>(epoch)) continue;
            std::size_t i = edges.head[e], j = edges.tail[e];
            double* yi = &emb.values[i * d];
            double* yj = &emb.values[j * d];
            double dist2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                double diff = yi[c] - yj[c];
                dist2 += diff * diff;
            }
            if (dist2 > 0.0) {
                double pd = std::pow(dist2, b);
                double coeff = (-2.0 * a * b * pd / dist2) / (a * pd + 1.0);
                for (std::size_t c = 0; c < d; ++c) {
                    double grad = clip(coeff * (yi[c] - yj[c])) * alpha;
                    yi[c] += grad;
                    yj[c] -= grad;
                }
            }
            next_sample[e] += epochs_per_sample[e];

            std::size_t n_neg = static_cast<std::size_t>(
                (static_cast<double>(epoch) - next_neg[e] + eps_neg[e]) / eps_neg[e]);
            for (std::size_t s = 0; s < n_neg; ++s) {
                std::size_t other = rng.next_below(static_cast<std::uint32_t>(n));
                if (other == i) continue;
                double* yo = &emb.values[other * d];
                double od2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    double diff = yi[c] - yo[c];
                    od2 += diff * diff;
                }
                double coeff = 2.0 * b / ((0.001 + od2) *
                                          (a * std::pow(std::max(od2, 0.0), b) + 1.0));
                for (std::size_t c = 0; c < d; ++c)
                    yi[c] += clip(coeff * (yi[c] - yo[c])) * alpha;
            }
            next_neg[e] += static_cast<double>(n_neg) * eps_neg[e];
        }
    }

    // final safety net against numeric blowups
    for (double& v : emb.values)
        if (!std::isfinite(v)) v = 0.0;
    out.m = std::move(emb);
    return out;
}

}  // namespace stackmine
