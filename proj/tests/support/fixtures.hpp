#pragma once

// Shared synthetic-data generators and scratch-directory helpers for tests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <stackmine/matrix.hpp>
#include <stackmine/rng.hpp>

#ifndef STACKMINE_SOURCE_DIR
#define STACKMINE_SOURCE_DIR "."
#endif

namespace fixtures {

inline std::string source_dir() { return STACKMINE_SOURCE_DIR; }
inline std::string resources_dir() { return source_dir() + "/resources"; }
inline std::string fixtures_dir() { return source_dir() + "/tests/fixtures"; }

// fresh scratch directory under the build tree
inline std::string scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() /
               ("stackmine_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

// isotropic Gaussian blobs; returns row-major matrix and per-row labels
inline stackmine::Matrix gaussian_blobs(const std::vector<std::vector<double>>& centers,
                                        std::size_t per_blob, double sigma,
                                        std::uint64_t seed,
                                        std::vector<std::int32_t>* labels = nullptr) {
    std::size_t dim = centers.front().size();
    stackmine::Matrix X(centers.size() * per_blob, dim);
    stackmine::Pcg32 rng(seed, 3);
    std::size_t row = 0;
    for (std::size_t b = 0; b < centers.size(); ++b) {
        for (std::size_t i = 0; i < per_blob; ++i, ++row) {
            for (std::size_t c = 0; c < dim; ++c)
                X.at(row, c) = centers[b][c] + sigma * rng.next_normal();
            if (labels) labels->push_back(static_cast<std::int32_t>(b));
        }
    }
    return X;
}

inline stackmine::Matrix uniform_square(std::size_t n, std::uint64_t seed) {
    stackmine::Matrix X(n, 2);
    stackmine::Pcg32 rng(seed, 5);
    for (std::size_t i = 0; i < n; ++i) {
        X.at(i, 0) = rng.next_double();
        X.at(i, 1) = rng.next_double();
    }
    return X;
}

}  // namespace fixtures
