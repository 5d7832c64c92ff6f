#include "doctest.h"
#include "ppgid/kernels.hpp"
#include "ppgid/synth.hpp"
#include "support.hpp"

using namespace ppgid;

namespace {

Matrix random_matrix(SplitMix64& rng, std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (auto& v : m.data) v = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("parallel kernels are bit-identical to the serial references") {
    SplitMix64 rng(5);
    for (int round = 0; round < 20; ++round) {
        const auto rows = 1 + rng.next() % 40;
        const auto len = 1 + rng.next() % 30;
        const auto waves = random_matrix(rng, rows, len);
        const auto ref = random_matrix(rng, 1, len);
        const auto a = kernels::cross_correlate_rows(waves, ref.row(0));
        const auto b = kernels::cross_correlate_rows_serial(waves, ref.row(0));
        CHECK(a.data == b.data);
        CHECK(kernels::column_min(a) == kernels::column_min_serial(a));

        std::vector<kernels::Frame> frames(1 + rng.next() % 50, kernels::Frame(len * 7));
        for (auto& f : frames)
            for (auto& p : f) p = static_cast<std::uint16_t>(rng.next());
        CHECK(kernels::frame_sums(frames) == kernels::frame_sums_serial(frames));
    }
}

TEST_CASE("cross correlation lag layout") {
    // single-sample shift: wave = reference delayed by one
    Matrix w(1, 3);
    w.data = {0.0, 1.0, 0.0};
    const std::vector<double> ref{1.0, 0.0, 0.0};
    const auto c = kernels::cross_correlate_rows_serial(w, ref);
    REQUIRE(c.cols == 5);
    // column k is lag k-2; sum_n w[n+lag] ref[n] peaks at lag +1
    CHECK(c(0, 3) == doctest::Approx(1.0 / 3.0));
    CHECK(c(0, 2) == 0.0);
}

TEST_CASE("frame sums do not overflow on 16-bit frames") {
    std::vector<kernels::Frame> frames(2, kernels::Frame(640 * 480, 65535));
    const auto s = kernels::frame_sums(frames);
    CHECK(s[0] == 65535.0 * 640 * 480);
}
