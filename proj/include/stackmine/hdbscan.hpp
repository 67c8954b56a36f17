#pragma once

// HDBSCAN: core distances -> mutual reachability -> Prim MST ->
// single-linkage dendrogram -> condensed tree (min_cluster_size) ->
// excess-of-mass cluster selection -> labels with noise = -1.
//
// The root of the condensed tree competes in selection like any other
// cluster, so a corpus that is one solid mode comes back as a single cluster
// rather than all noise. When the root wins, its direct fall-out points are
// only members if they persisted to the root's densest level (the maximum
// lambda among the root's direct edges); everything shed earlier is noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"

namespace stackmine {

struct HdbscanParams {
    std::size_t min_cluster_size = 10;
    std::size_t min_samples = 0;  // 0 means "use min_cluster_size"
};

struct MstEdge {
    std::int32_t a = 0;
    std::int32_t b = 0;
    double weight = 0.0;
};

struct CondensedTree {
    // clusters are numbered 0 (root) .. size()-1, parents before children
    std::vector<std::int32_t> parent;        // -1 for the root
    std::vector<double> birth_lambda;
    std::vector<std::int32_t> size_at_birth;
    std::vector<std::vector<std::int32_t>> children;  // cluster children
    // one fall-out record per point
    std::vector<std::int32_t> point_parent;
    std::vector<double> point_lambda;

    std::size_t cluster_count() const { return parent.size(); }
};

struct ClusterAssignment {
    std::vector<std::int32_t> labels;        // -1 = noise, else 0..k-1 by size
    std::vector<double> membership_strength; // in [0,1], 0 for noise
    std::size_t k = 0;
    // diagnostics (tests assert on these)
    std::vector<MstEdge> mst;
    CondensedTree tree;
    std::vector<double> stability;           // per condensed cluster
    std::vector<double> subtree_stability;
    std::vector<char> selected;
    std::size_t noise_count = 0;
};

namespace hdbscan_detail {

constexpr double kDistFloor = 1e-12;

inline double lambda_of(double dist) { return 1.0 / std::max(dist, kDistFloor); }

}  // namespace hdbscan_detail

// Distance to the min_samples-th nearest neighbor (the point itself excluded).
inline std::vector<double> core_distances(const Matrix& X, std::size_t min_samples) {
    const std::size_t n = X.n_rows;
    if (min_samples == 0 || min_samples >= n)
        throw std::invalid_argument("core_distances: need 0 < min_samples < n_rows");
    std::vector<double> cores(n);
    std::vector<double> row(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row[m++] = euclidean(X.row(i), X.row(j));
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(min_samples - 1),
                         row.end());
        cores[i] = row[min_samples - 1];
    }
    return cores;
}

inline double mutual_reachability(const Matrix& X, const std::vector<double>& cores,
                                  std::size_t i, std::size_t j) {
    return std::max({cores[i], cores[j], euclidean(X.row(i), X.row(j))});
}

// Prim over the implicit complete mutual-reachability graph; O(n^2) time,
// O(n) memory. Ties go to the lowest vertex index.
inline std::vector<MstEdge> mutual_reachability_mst(const Matrix& X,
                                                    const std::vector<double>& cores) {
    const std::size_t n = X.n_rows;
    std::vector<bool> in_tree(n, false);
    std::vector<double> key(n, std::numeric_limits<double>::infinity());
    std::vector<std::int32_t> parent(n, 0);
    in_tree[0] = true;
    for (std::size_t j = 1; j < n; ++j) key[j] = mutual_reachability(X, cores, 0, j);
    std::vector<MstEdge> edges;
    edges.reserve(n - 1);
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!in_tree[j] && (best == n || key[j] < key[best])) best = j;
        in_tree[best] = true;
        edges.push_back({parent[best], static_cast<std::int32_t>(best), key[best]});
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            double d = mutual_reachability(X, cores, best, j);
            if (d < key[j]) {
                key[j] = d;
                parent[j] = static_cast<std::int32_t>(best);
            }
        }
    }
    return edges;
}

namespace hdbscan_detail {

struct DendrogramNode {
    std::int32_t left = -1;   // < n: leaf point, >= n: internal
    std::int32_t right = -1;
    double dist = 0.0;
    std::int32_t size = 1;
};

// single-linkage over MST edges sorted ascending, lexicographic tie order
inline std::vector<DendrogramNode> single_linkage(std::vector<MstEdge> edges,
                                                  std::size_t n) {
    std::sort(edges.begin(), edges.end(), [](const MstEdge& x, const MstEdge& y) {
        auto xa = std::minmax(x.a, x.b), ya = std::minmax(y.a, y.b);
        return std::tie(x.weight, xa.first, xa.second) <
               std::tie(y.weight, ya.first, ya.second);
    });
    std::vector<DendrogramNode> nodes(2 * n - 1);
    std::vector<std::int32_t> comp(n);  // point -> current dendrogram node
    std::iota(comp.begin(), comp.end(), 0);
    std::vector<std::int32_t> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](std::int32_t x) {
        while (uf[x] != x) {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        return x;
    };
    std::int32_t next = static_cast<std::int32_t>(n);
    for (const MstEdge& e : edges) {
        std::int32_t ra = find(e.a), rb = find(e.b);
        DendrogramNode& nd = nodes[next];
        nd.left = comp[ra];
        nd.right = comp[rb];
        nd.dist = e.weight;
        nd.size = nodes[comp[ra]].size + nodes[comp[rb]].size;
        uf[rb] = ra;
        comp[ra] = next;
        ++next;
    }
    return nodes;
}

inline void collect_leaves(const std::vector<DendrogramNode>& nodes, std::int32_t at,
                           std::size_t n, std::vector<std::int32_t>& out) {
    std::vector<std::int32_t> stack{at};
    while (!stack.empty()) {
        std::int32_t cur = stack.back();
        stack.pop_back();
        if (cur < static_cast<std::int32_t>(n)) {
            out.push_back(cur);
        } else {
            stack.push_back(nodes[cur].left);
            stack.push_back(nodes[cur].right);
        }
    }
}

inline CondensedTree condense(const std::vector<DendrogramNode>& nodes, std::size_t n,
                              std::size_t min_cluster_size) {
    CondensedTree t;
    t.point_parent.assign(n, 0);
    t.point_lambda.assign(n, 0.0);
    auto new_cluster = [&](std::int32_t parent, double birth, std::int32_t size) {
        t.parent.push_back(parent);
        t.birth_lambda.push_back(birth);
        t.size_at_birth.push_back(size);
        t.children.emplace_back();
        if (parent >= 0)
            t.children[static_cast<std::size_t>(parent)].push_back(
                static_cast<std::int32_t>(t.parent.size() - 1));
        return static_cast<std::int32_t>(t.parent.size() - 1);
    };
    std::int32_t root_node = static_cast<std::int32_t>(nodes.size() - 1);
    std::int32_t root_cluster = new_cluster(-1, 0.0, nodes[root_node].size);

    std::vector<std::int32_t> fell;
    std::vector<std::pair<std::int32_t, std::int32_t>> stack{{root_node, root_cluster}};
    while (!stack.empty()) {
        auto [node_id, cluster] = stack.back();
        stack.pop_back();
        if (node_id < static_cast<std::int32_t>(n)) {
            // a single point can only continue a cluster when mcs <= 1,
            // which the entry validation excludes
            t.point_parent[node_id] = cluster;
            t.point_lambda[node_id] = lambda_of(0.0);
            continue;
        }
        const DendrogramNode& nd = nodes[node_id];
        double lam = lambda_of(nd.dist);
        std::int32_t l = nd.left, r = nd.right;
        std::int32_t ls = nodes[l].size, rs = nodes[r].size;
        bool keep_l = ls >= static_cast<std::int32_t>(min_cluster_size);
        bool keep_r = rs >= static_cast<std::int32_t>(min_cluster_size);
        if (keep_l && keep_r) {
            std::int32_t cl = new_cluster(cluster, lam, ls);
            stack.emplace_back(l, cl);
            std::int32_t cr = new_cluster(cluster, lam, rs);
            stack.emplace_back(r, cr);
        } else if (keep_l || keep_r) {
            std::int32_t keep = keep_l ? l : r;
            std::int32_t shed = keep_l ? r : l;
            fell.clear();
            collect_leaves(nodes, shed, n, fell);
            for (std::int32_t p : fell) {
                t.point_parent[p] = cluster;
                t.point_lambda[p] = lam;
            }
            stack.emplace_back(keep, cluster);
        } else {
            fell.clear();
            collect_leaves(nodes, node_id, n, fell);
            for (std::int32_t p : fell) {
                t.point_parent[p] = cluster;
                t.point_lambda[p] = lam;
            }
        }
    }
    return t;
}

}  // namespace hdbscan_detail

inline ClusterAssignment hdbscan_fit(const Matrix& Y, const HdbscanParams& params) {
    using namespace hdbscan_detail;
    const std::size_t n = Y.n_rows;
    const std::size_t mcs = params.min_cluster_size;
    std::size_t min_samples = params.min_samples ? params.min_samples : mcs;
    if (mcs < 2) throw std::invalid_argument("min_cluster_size must be >= 2");
    if (min_samples > mcs)
        throw std::invalid_argument("min_samples must be <= min_cluster_size");
    if (n <= mcs)
        throw std::invalid_argument("corpus too small for requested min_cluster_size");
    if (!Y.all_finite()) throw std::invalid_argument("hdbscan: non-finite input");

    ClusterAssignment out;
    auto cores = core_distances(Y, min_samples);
    out.mst = mutual_reachability_mst(Y, cores);
    auto dendro = single_linkage(out.mst, n);
    out.tree = condense(dendro, n, mcs);
    const CondensedTree& t = out.tree;
    const std::size_t C = t.cluster_count();

    // excess-of-mass stability
    out.stability.assign(C, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        std::int32_t c = t.point_parent[p];
        out.stability[c] += t.point_lambda[p] - t.birth_lambda[c];
    }
    for (std::size_t c = 1; c < C; ++c) {
        std::int32_t par = t.parent[c];
        out.stability[par] +=
            (t.birth_lambda[c] - t.birth_lambda[par]) * t.size_at_birth[c];
    }

    // bottom-up selection; children always have larger ids than parents
    out.selected.assign(C, 0);
    out.subtree_stability.assign(C, 0.0);
    for (std::size_t ci = C; ci-- > 0;) {
        double child_sum = 0.0;
        for (std::int32_t ch : t.children[ci]) child_sum += out.subtree_stability[ch];
        if (t.children[ci].empty() || out.stability[ci] >= child_sum) {
            out.selected[ci] = 1;
            out.subtree_stability[ci] = out.stability[ci];
            // a selected ancestor absorbs everything below it
            std::vector<std::int32_t> stack(t.children[ci].begin(), t.children[ci].end());
            while (!stack.empty()) {
                std::int32_t d = stack.back();
                stack.pop_back();
                out.selected[d] = 0;
                stack.insert(stack.end(), t.children[d].begin(), t.children[d].end());
            }
        } else {
            out.subtree_stability[ci] = child_sum;
        }
    }

    // the root's membership gate: the densest level among its direct edges
    double root_gate = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        if (t.point_parent[p] == 0) root_gate = std::max(root_gate, t.point_lambda[p]);
    for (std::int32_t ch : t.children[0])
        root_gate = std::max(root_gate, t.birth_lambda[ch]);

    // point -> nearest selected ancestor
    std::vector<std::int32_t> owner(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        std::int32_t c = t.point_parent[p];
        while (c >= 0 && !out.selected[c]) c = t.parent[c];
        if (c < 0) continue;
        if (c == 0 && t.point_lambda[p] < root_gate) continue;
        owner[p] = c;
    }

    // enforce the minimum size, then number clusters by decreasing size
    // (ties by lowest contained point id)
    std::vector<std::int64_t> member_count(C, 0);
    for (std::size_t p = 0; p < n; ++p)
        if (owner[p] >= 0) ++member_count[owner[p]];
    std::vector<std::int32_t> kept;
    for (std::size_t c = 0; c < C; ++c)
        if (out.selected[c] && member_count[c] >= static_cast<std::int64_t>(mcs))
            kept.push_back(static_cast<std::int32_t>(c));
    std::vector<std::int32_t> first_point(C, static_cast<std::int32_t>(n));
    for (std::size_t p = n; p-- > 0;)
        if (owner[p] >= 0) first_point[owner[p]] = static_cast<std::int32_t>(p);
    std::sort(kept.begin(), kept.end(), [&](std::int32_t a, std::int32_t b) {
        if (member_count[a] != member_count[b]) return member_count[a] > member_count[b];
        return first_point[a] < first_point[b];
    });
    std::vector<std::int32_t> relabel(C, -1);
    for (std::size_t i = 0; i < kept.size(); ++i) relabel[kept[i]] = static_cast<std::int32_t>(i);
    out.k = kept.size();

    out.labels.assign(n, -1);
    out.membership_strength.assign(n, 0.0);
    std::vector<double> max_lambda(C, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        if (owner[p] < 0 || relabel[owner[p]] < 0) continue;
        max_lambda[owner[p]] = std::max(max_lambda[owner[p]], t.point_lambda[p]);
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (owner[p] < 0 || relabel[owner[p]] < 0) continue;
        out.labels[p] = relabel[owner[p]];
        double mx = max_lambda[owner[p]];
        out.membership_strength[p] =
            mx > 0.0 ? std::min(1.0, t.point_lambda[p] / mx) : 1.0;
    }
    for (std::size_t p = 0; p < n; ++p)
        if (out.labels[p] < 0) ++out.noise_count;
    return out;
}

}  // namespace stackmine
