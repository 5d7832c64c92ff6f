#include "doctest.h"
#include "ppgid/error.hpp"
#include "ppgid/signal_processing.hpp"
#include "ppgid/synth.hpp"
#include "support.hpp"

#include <numbers>

using namespace ppgid;
using std::numbers::pi;

namespace {

PpgSignal sampled(double fs, std::size_t n, auto&& fn) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = fn(static_cast<double>(i) / fs);
    return PpgSignal(std::move(x), fs);
}

std::vector<double> random_vector(SplitMix64& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("detrend examples") {
    const auto c = detrend(PpgSignal({5, 5, 5, 5}, 14.0), 0);
    for (double v : c.samples()) CHECK(std::abs(v) < 1e-12);
    const auto l = detrend(PpgSignal({0, 1, 2, 3}, 14.0), 1);
    for (double v : l.samples()) CHECK(std::abs(v) < 1e-9);

    const auto sig = sampled(14.0, 140, [](double t) { return std::sin(2 * pi * 1.3 * t) + 4.0 - 0.7 * t; });
    const auto r = detrend(sig, 1);
    // residual is the sine minus its own least-squares line
    const auto sine = sampled(14.0, 140, [](double t) { return std::sin(2 * pi * 1.3 * t); });
    const auto sine_r = detrend(sine, 1);
    CHECK(max_abs_diff(r.samples(), sine_r.samples()) < 1e-9);
    CHECK(max_abs_diff(r.samples(), sine.samples()) < 0.1);

    CHECK_THROWS_AS(detrend(PpgSignal({1, 2}, 14.0), 2), Error);
}

TEST_CASE("detrend removes polynomials up to its order") {
    SplitMix64 rng(21);
    for (int order = 0; order <= 4; ++order) {
        for (int round = 0; round < 5; ++round) {
            std::vector<double> coef(static_cast<std::size_t>(order) + 1);
            for (auto& c : coef) c = 10.0 * rng.normal();
            const auto p = sampled(14.0, 210, [&](double t) {
                double v = 0.0;
                for (auto it = coef.rbegin(); it != coef.rend(); ++it) v = v * (t / 15.0) + *it;
                return v;
            });
            const auto r = detrend(p, order);
            double scale = 0.0;
            for (double v : p.samples()) scale = std::max(scale, std::abs(v));
            for (double v : r.samples()) CHECK(std::abs(v) <= 1e-9 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("detrend output has zero mean and is idempotent") {
    SplitMix64 rng(22);
    for (int order = 0; order <= 3; ++order) {
        const PpgSignal x(random_vector(rng, 100), 14.0);
        const auto once = detrend(x, order);
        CHECK(std::abs(oracle::mean(once.samples())) < 1e-9);
        CHECK(max_abs_diff(detrend(once, order).samples(), once.samples()) < 1e-9);
    }
}

TEST_CASE("chebyshev keeps DC") {
    const PpgSignal dc(std::vector<double>(100, 3.5), 14.0);
    for (int order : {1, 2, 3, 6}) {
        const auto y = chebyshev_lowpass(dc, {order, 3.0, 0.5});
        for (double v : y.samples()) CHECK(std::abs(v - 3.5) < 1e-6);
    }
}

TEST_CASE("chebyshev forward-backward matches the analytic magnitude") {
    const double fs = 14.0;
    const std::size_t n = 14 * 120;
    for (int order : {2, 6}) {
        for (double f : {0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.5, 4.5, 6.0}) {
            const auto x = sampled(fs, n, [&](double t) { return std::sin(2 * pi * f * t); });
            const auto y = chebyshev_lowpass(x, {order, 3.0, 0.5});
            const double measured = oracle::sinusoid_amplitude(y.samples(), f, fs, n / 4, 3 * n / 4);
            const double h = oracle::chebyshev_magnitude(order, 3.0, 0.5, fs, f);
            CAPTURE(order);
            CAPTURE(f);
            CHECK(measured == doctest::Approx(h * h).epsilon(1e-4));
        }
    }
}

TEST_CASE("single pass is causal and filtfilt has zero phase") {
    const auto sos = design_chebyshev1_lowpass({6, 3.0, 0.5}, 14.0);
    std::vector<double> impulse(50, 0.0);
    impulse[10] = 1.0;
    const auto y = sos_filter(sos, impulse);
    for (std::size_t i = 0; i < 10; ++i) CHECK(y[i] == 0.0);

    for (std::size_t c : {20u, 35u, 60u}) {
        const auto pulse = sampled(14.0, 100, [&](double t) {
            const double d = t * 14.0 - static_cast<double>(c);
            return std::exp(-d * d / 8.0);
        });
        const auto f = chebyshev_lowpass(pulse, {6, 3.0, 0.5});
        const auto& s = f.samples();
        CHECK(static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin()) == c);
    }
}

TEST_CASE("chebyshev argument errors") {
    const PpgSignal x(std::vector<double>(50, 1.0), 14.0);
    CHECK_THROWS_AS(chebyshev_lowpass(x, {6, 7.0, 0.5}), Error);
    CHECK_THROWS_AS(chebyshev_lowpass(x, {0, 3.0, 0.5}), Error);
}

TEST_CASE("moving average examples") {
    const PpgSignal k(std::vector<double>(9, 2.5), 14.0);
    for (int order = 1; order <= 6; ++order) CHECK(moving_average(k, order).samples() == k.samples());

    const auto imp = moving_average(PpgSignal({0, 0, 0, 1, 0, 0, 0}, 14.0), 2).samples();
    CHECK(imp[1] == 0.0);
    CHECK(imp[2] == doctest::Approx(1.0 / 3.0));
    CHECK(imp[3] == doctest::Approx(1.0 / 3.0));
    CHECK(imp[4] == doctest::Approx(1.0 / 3.0));
    CHECK(imp[5] == 0.0);

    const auto ramp = moving_average(PpgSignal({0, 1, 2, 3, 4}, 14.0), 2).samples();
    CHECK(ramp == std::vector<double>{0.5, 1, 2, 3, 3.5});

    CHECK_THROWS_AS(moving_average(PpgSignal({1, 2}, 14.0), 2), Error);
    CHECK_THROWS_AS(moving_average(k, 0), Error);
}

TEST_CASE("filters are linear") {
    SplitMix64 rng(23);
    for (int round = 0; round < 5; ++round) {
        const auto x = random_vector(rng, 120), y = random_vector(rng, 120);
        const double a = rng.normal(), b = rng.normal();
        std::vector<double> mix(120);
        for (std::size_t i = 0; i < 120; ++i) mix[i] = a * x[i] + b * y[i];
        const PpgSignal X(x, 14.0), Y(y, 14.0), M(mix, 14.0);

        auto check = [&](auto&& f) {
            const auto fx = f(X).samples(), fy = f(Y).samples(), fm = f(M).samples();
            for (std::size_t i = 0; i < 120; ++i) CHECK(std::abs(fm[i] - (a * fx[i] + b * fy[i])) < 1e-9);
        };
        check([](const PpgSignal& s) { return chebyshev_lowpass(s, {6, 3.0, 0.5}); });
        check([](const PpgSignal& s) { return chebyshev_lowpass(s, {2, 3.0, 0.5}); });
        for (int order = 2; order <= 6; ++order) check([&](const PpgSignal& s) { return moving_average(s, order); });
    }
}

TEST_CASE("find_peaks examples") {
    CHECK(find_peaks(PpgSignal({0, 1, 0, 1, 0}, 14.0), {0.0, 0.0}).indices == std::vector<std::size_t>{1, 3});
    CHECK(find_peaks(PpgSignal({0, 1, 2, 3, 4, 5}, 14.0), {0.0, 0.0}).empty());
    // plateau of three resolves to its middle sample
    CHECK(find_peaks(PpgSignal({0, 2, 2, 2, 0}, 14.0), {0.0, 0.0}).indices == std::vector<std::size_t>{2});
    // a small bump on a shoulder falls under the prominence floor
    CHECK(find_peaks(PpgSignal({0, 10, 0, 0.5, 0.4, 0.45, 0, 9, 0}, 14.0), {0.0, 0.2}).indices ==
          std::vector<std::size_t>{1, 7});
}

TEST_CASE("find_peaks respects the minimum distance") {
    SplitMix64 rng(24);
    for (int round = 0; round < 30; ++round) {
        const PpgSignal x(random_vector(rng, 200), 14.0);
        const double dist = 0.05 + 0.5 * rng.uniform();
        const auto p = find_peaks(x, {dist, 0.0});
        const auto d = static_cast<std::size_t>(std::ceil(dist * 14.0));
        for (std::size_t i = 1; i < p.size(); ++i) CHECK(p.indices[i] - p.indices[i - 1] >= d);
        for (std::size_t i = 1; i < p.size(); ++i) CHECK(p.indices[i] > p.indices[i - 1]);
    }
}

TEST_CASE("find_peaks recovers synthetic beats") {
    SplitMix64 rng(25);
    for (int round = 0; round < 10; ++round) {
        SynthSpec s;
        s.hr_bpm = 55.0 + 55.0 * rng.uniform();
        s.morphology = morphology_presets()[static_cast<std::size_t>(round % 5)].morphology;
        s.phase_frac = rng.uniform();
        s.seed = rng.next();
        const auto res = synth_ppg(s);
        const auto p = find_peaks(chebyshev_lowpass(detrend(res.signal, 2), {6, 3.0, 0.5}));
        const auto& truth = res.truth.beat_peak_indices.indices;
        // edge beats may be cut off; every interior true beat must be found
        for (std::size_t t : truth) {
            if (t < 3 || t + 3 >= res.signal.size()) continue;
            const bool found = std::any_of(p.indices.begin(), p.indices.end(), [&](std::size_t i) {
                return (i > t ? i - t : t - i) <= 1;
            });
            CAPTURE(t);
            CHECK(found);
        }
    }
}

TEST_CASE("parabolic offset") {
    const std::vector<double> sym{1, 3, 1};
    CHECK(parabolic_offset(sym, 1) == 0.0);
    // samples of -(x-0.25)^2 at -1, 0, 1
    const std::vector<double> q{-1.5625, -0.0625, -0.5625};
    CHECK(parabolic_offset(q, 1) == doctest::Approx(0.25));
    CHECK(parabolic_offset(q, 0) == 0.0);
    CHECK(parabolic_offset(q, 2) == 0.0);
}

TEST_CASE("skewness") {
    const std::vector<double> sym{1, 2, 3};
    CHECK(std::abs(skewness(sym)) < 1e-12);
    const std::vector<double> x{0, 0, 0, 1};
    CHECK(skewness(x) == doctest::Approx(oracle::skewness(x)).epsilon(1e-12));
    CHECK(skewness(x) == doctest::Approx(2.0));

    SplitMix64 rng(26);
    for (int round = 0; round < 20; ++round) {
        auto v = random_vector(rng, 3 + rng.next() % 50);
        for (auto& e : v) e = std::exp(e);
        const double s = skewness(v);
        CHECK(s == doctest::Approx(oracle::skewness(v)).epsilon(1e-9));
        std::vector<double> neg, affine;
        const double a = 0.1 + 10 * rng.uniform(), b = rng.normal() * 100;
        for (double e : v) {
            neg.push_back(-e);
            affine.push_back(a * e + b);
        }
        CHECK(std::abs(skewness(neg) + s) < 1e-9);
        CHECK(std::abs(skewness(affine) - s) < 1e-9);
    }
    const std::vector<double> two{1, 2}, flat{4, 4, 4};
    CHECK_THROWS_AS(skewness(two), Error);
    CHECK_THROWS_AS(skewness(flat), Error);
}
