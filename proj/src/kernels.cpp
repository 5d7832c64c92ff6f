#include "ppgid/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>

namespace ppgid::kernels {
namespace {

double sum_frame(const Frame& f) {
    std::uint64_t total = 0;
    for (std::uint16_t v : f) total += v;
    return static_cast<double>(total);
}

void correlate_one(std::span<const double> wave, std::span<const double> reference, std::span<double> out) {
    const auto len = static_cast<std::ptrdiff_t>(reference.size());
    const double scale = 1.0 / static_cast<double>(len);
    for (std::ptrdiff_t k = 0; k < 2 * len - 1; ++k) {
        const std::ptrdiff_t lag = k - (len - 1);
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -lag);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len - lag);
        double acc = 0.0;
        for (std::ptrdiff_t n = lo; n < hi; ++n) acc += wave[n + lag] * reference[n];
        out[k] = acc * scale;
    }
}

}  // namespace

std::vector<double> frame_sums(std::span<const Frame> frames) {
    std::vector<double> out(frames.size());
    const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = sum_frame(frames[i]);
    return out;
}

std::vector<double> frame_sums_serial(std::span<const Frame> frames) {
    std::vector<double> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(sum_frame(f));
    return out;
}

Matrix cross_correlate_rows(const Matrix& waves, std::span<const double> reference) {
    Matrix out(waves.rows, reference.empty() ? 0 : 2 * reference.size() - 1);
    const auto rows = static_cast<std::ptrdiff_t>(waves.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) correlate_one(waves.row(r), reference, out.row(r));
    return out;
}

Matrix cross_correlate_rows_serial(const Matrix& waves, std::span<const double> reference) {
    Matrix out(waves.rows, reference.empty() ? 0 : 2 * reference.size() - 1);
    for (std::size_t r = 0; r < waves.rows; ++r) correlate_one(waves.row(r), reference, out.row(r));
    return out;
}

std::vector<double> column_min(const Matrix& m) {
    std::vector<double> out(m.cols);
    const auto cols = static_cast<std::ptrdiff_t>(m.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
        double v = m(0, c);
        for (std::size_t r = 1; r < m.rows; ++r) v = std::min(v, m(r, c));
        out[c] = v;
    }
    return out;
}

std::vector<double> column_min_serial(const Matrix& m) {
    if (m.rows == 0) return {};
    std::vector<double> out(m.row(0).begin(), m.row(0).end());
    for (std::size_t r = 1; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out[c] = std::min(out[c], m(r, c));
    return out;
}

}  // namespace ppgid::kernels
