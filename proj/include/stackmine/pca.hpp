#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace stackmine {

namespace detail {

// Cyclic Jacobi eigensolver for a symmetric matrix. Deterministic sweep
// order; returns eigenvalues and eigenvectors (columns of V).
inline void jacobi_eigen(std::vector<double>& a, std::size_t d,
                         std::vector<double>& eigenvalues,
                         std::vector<double>& v) {
    v.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
    auto A = [&](std::size_t r, std::size_t c) -> double& { return a[r * d + c]; };
    auto V = [&](std::size_t r, std::size_t c) -> double& { return v[r * d + c]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                double apq = A(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double tau = s / (1.0 + c);
                double app = A(p, p), aqq = A(q, q);
                A(p, p) = app - t * apq;
                A(q, q) = aqq + t * apq;
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                for (std::size_t r = 0; r < d; ++r) {
                    if (r != p && r != q) {
                        double arp = A(r, p), arq = A(r, q);
                        A(r, p) = arp - s * (arq + tau * arp);
                        A(p, r) = A(r, p);
                        A(r, q) = arq + s * (arp - tau * arq);
                        A(q, r) = A(r, q);
                    }
                    double vrp = V(r, p), vrq = V(r, q);
                    V(r, p) = vrp - s * (vrq + tau * vrp);
                    V(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    eigenvalues.resize(d);
    for (std::size_t i = 0; i < d; ++i) eigenvalues[i] = a[i * d + i];
}

}  // namespace detail

struct PcaModel {
    std::vector<double> mean;       // column means of the input
    Matrix components;              // r x dim, rows orthonormal
    std::vector<double> explained;  // eigenvalues, descending
    std::size_t rank = 0;           // numerically nonzero directions
    std::vector<std::string> warnings;
};

inline PcaModel pca_fit(const Matrix& X, std::size_t r) {
    const std::size_t n = X.n_rows, d = X.dim;
    if (n == 0 || d == 0) throw std::invalid_argument("pca: empty matrix");
    if (r > std::min(n, d))
        throw std::invalid_argument("pca: r exceeds min(n_rows, dim)");
    PcaModel model;
    model.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = X.row(i);
        for (std::size_t c = 0; c < d; ++c) model.mean[c] += row[c];
    }
    for (double& m : model.mean) m /= static_cast<double>(n);

    // covariance of the centered data
    std::vector<double> cov(d * d, 0.0);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = X.row(i);
        for (std::size_t c = 0; c < d; ++c) centered[c] = row[c] - model.mean[c];
        for (std::size_t p = 0; p < d; ++p) {
            double cp = centered[p];
            if (cp == 0.0) continue;
            for (std::size_t q = p; q < d; ++q) cov[p * d + q] += cp * centered[q];
        }
    }
    double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = p; q < d; ++q) {
            cov[p * d + q] /= denom;
            cov[q * d + p] = cov[p * d + q];
        }

    std::vector<double> eigenvalues, vectors;
    detail::jacobi_eigen(cov, d, eigenvalues, vectors);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return eigenvalues[a] > eigenvalues[b];
    });

    double top = eigenvalues.empty() ? 0.0 : std::max(0.0, eigenvalues[order[0]]);
    double tol = top * 1e-12;
    model.rank = 0;
    for (std::size_t i = 0; i < d; ++i)
        if (eigenvalues[order[i]] > tol && eigenvalues[order[i]] > 0) ++model.rank;

    model.components = Matrix(r, d);
    model.explained.resize(r);
    for (std::size_t c = 0; c < r; ++c) {
        std::size_t src = order[c];
        model.explained[c] = eigenvalues[src];
        if (c >= model.rank) continue;  // zero component beyond rank
        auto comp = model.components.row(c);
        for (std::size_t k = 0; k < d; ++k) comp[k] = vectors[k * d + src];
        // sign convention: the largest-magnitude coordinate is positive
        std::size_t arg = 0;
        for (std::size_t k = 1; k < d; ++k)
            if (std::abs(comp[k]) > std::abs(comp[arg])) arg = k;
        if (comp[arg] < 0)
            for (std::size_t k = 0; k < d; ++k) comp[k] = -comp[k];
    }
    if (r > model.rank)
        model.warnings.push_back("requested " + std::to_string(r) +
                                 " components but rank is " +
                                 std::to_string(model.rank) +
                                 "; extra columns zero-filled");
    return model;
}

inline Matrix pca_transform(const PcaModel& model, const Matrix& X) {
    const std::size_t n = X.n_rows, d = X.dim, r = model.components.n_rows;
    Matrix out(n, r);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = X.row(i);
        for (std::size_t c = 0; c < d; ++c) centered[c] = row[c] - model.mean[c];
        for (std::size_t c = 0; c < r; ++c)
            out.at(i, c) = dot(model.components.row(c), centered);
    }
    return out;
}

// Projection onto the top-r principal components of the mean-centered input.
inline ReducedEmbedding pca_reduce(const Matrix& X, std::size_t r) {
    if (!X.all_finite()) throw std::invalid_argument("pca: non-finite input");
    PcaModel model = pca_fit(X, r);
    ReducedEmbedding out;
    out.m = pca_transform(model, X);
    out.warnings = model.warnings;
    return out;
}

}  // namespace stackmine
