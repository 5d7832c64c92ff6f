#pragma once

// Data-parallel inner loops. Each kernel comes as an OpenMP version and a
// serial reference; both must produce bit-identical results, which the unit
// tests and the benchmark target check.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ppgid {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
};

namespace kernels {

using Frame = std::vector<std::uint16_t>;

/// Sum of pixel intensities per frame, accumulated in 64-bit integers.
std::vector<double> frame_sums(std::span<const Frame> frames);
std::vector<double> frame_sums_serial(std::span<const Frame> frames);

/// Full cross-correlation of every row of `waves` against `reference`
/// over the 2L-1 lags -(L-1)..(L-1), divided by L. Output column k holds
/// lag k-(L-1): sum_n waves[r][n+lag] * reference[n].
Matrix cross_correlate_rows(const Matrix& waves, std::span<const double> reference);
Matrix cross_correlate_rows_serial(const Matrix& waves, std::span<const double> reference);

/// Pointwise minimum down each column.
std::vector<double> column_min(const Matrix& m);
std::vector<double> column_min_serial(const Matrix& m);

}  // namespace kernels
}  // namespace ppgid
