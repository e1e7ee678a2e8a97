#pragma once

#include <cstddef>
#include <vector>

namespace meal {

// Dense row-major matrix of doubles. Just enough for feature tables and
// embedding layouts.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    double* row(size_t r) { return &data[r * cols]; }
    const double* row(size_t r) const { return &data[r * cols]; }
};

}  // namespace meal
