#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stackmine {

// Row-major dense matrix of finite doubles, row i aligned to doc_id i.
struct Matrix {
    std::size_t n_rows = 0;
    std::size_t dim = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t n, std::size_t d) : n_rows(n), dim(d), values(n * d, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return values[r * dim + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * dim + c]; }
    std::span<double> row(std::size_t r) { return {values.data() + r * dim, dim}; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * dim, dim};
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

struct EmbeddingMatrix {
    Matrix m;
    std::vector<std::size_t> zero_rows;  // docs that produced an all-zero row
};

struct ReducedEmbedding {
    Matrix m;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double cosine(std::span<const double> a, std::span<const double> b) {
    double na = l2_norm(a), nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

// shortest round-trip decimal form
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
            if (std::strtod(shorter, nullptr) == v) return shorter;
        }
    }
    return buf;
}

// Text matrix format: header "n dim" then one "row_id TAB v1,v2,..." per row.
inline void save_matrix(const Matrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << m.n_rows << ' ' << m.dim << '\n';
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        out << r << '\t';
        for (std::size_t c = 0; c < m.dim; ++c) {
            if (c) out << ',';
            out << format_double(m.at(r, c));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

inline Matrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::size_t n = 0, d = 0;
    in >> n >> d;
    in.ignore(1, '\n');
    Matrix m(n, d);
    std::string line;
    for (std::size_t r = 0; r < n; ++r) {
        if (!std::getline(in, line))
            throw std::runtime_error(path + ": truncated at row " + std::to_string(r));
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ": bad row " + std::to_string(r));
        std::size_t id = std::strtoull(line.c_str(), nullptr, 10);
        if (id != r)
            throw std::runtime_error(path + ": row id out of order at " + std::to_string(r));
        const char* p = line.c_str() + tab + 1;
        for (std::size_t c = 0; c < d; ++c) {
            char* end = nullptr;
            m.at(r, c) = std::strtod(p, &end);
            if (end == p)
                throw std::runtime_error(path + ": bad value in row " + std::to_string(r));
            p = (*end == ',') ? end + 1 : end;
        }
    }
    return m;
}

}  // namespace stackmine
