#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spoofguard/common.hpp"

namespace spoofguard {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    [[nodiscard]] std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    /// Rows picked by index, in the given order.
    [[nodiscard]] Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto src = row(idx[k]);
            std::copy(src.begin(), src.end(), out.row(k).begin());
        }
        return out;
    }

    bool operator==(const Matrix&) const = default;
};

}  // namespace spoofguard
