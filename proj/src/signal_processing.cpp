#include "ppgid/signal_processing.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "ppgid/error.hpp"

namespace ppgid {

PpgSignal detrend(const PpgSignal& sig, int poly_order) {
    if (poly_order < 0) throw usage_error("detrend order must be non-negative");
    const std::size_t n = sig.size();
    if (n <= static_cast<std::size_t>(poly_order)) throw algorithm_error("detrend: signal too short for polynomial order");

    // Orthonormal basis of the polynomial space on x in [-1, 1] via modified
    // Gram-Schmidt (run twice), then subtract the projection.
    const std::size_t cols = static_cast<std::size_t>(poly_order) + 1;
    std::vector<std::vector<double>> basis;
    basis.reserve(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = n == 1 ? 0.0 : 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0;
            q[i] = std::pow(x, static_cast<double>(k));
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const double d = std::inner_product(q.begin(), q.end(), b.begin(), 0.0);
                for (std::size_t i = 0; i < n; ++i) q[i] -= d * b[i];
            }
        }
        const double norm = std::sqrt(std::inner_product(q.begin(), q.end(), q.begin(), 0.0));
        if (norm == 0.0) throw algorithm_error("detrend: degenerate polynomial basis");
        for (double& v : q) v /= norm;
        basis.push_back(std::move(q));
    }

    std::vector<double> r = sig.samples();
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            const double d = std::inner_product(r.begin(), r.end(), b.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i) r[i] -= d * b[i];
        }
    }
    return sig.with_samples(std::move(r));
}

std::vector<Biquad> design_chebyshev1_lowpass(const ChebyshevConfig& cfg, double fs) {
    if (cfg.order < 1) throw usage_error("Chebyshev order must be positive");
    if (!(cfg.cutoff_hz > 0.0) || !(cfg.cutoff_hz < fs / 2.0)) throw usage_error("cutoff must lie in (0, Nyquist)");
    if (!(cfg.ripple_db > 0.0)) throw usage_error("passband ripple must be positive");

    using std::numbers::pi;
    const int n = cfg.order;
    const double eps = std::sqrt(std::pow(10.0, cfg.ripple_db / 10.0) - 1.0);
    const double mu = std::asinh(1.0 / eps) / n;
    const double warped = 2.0 * fs * std::tan(pi * cfg.cutoff_hz / fs);

    auto digital_pole = [&](int k) {
        const double theta = pi * (2.0 * k + 1.0) / (2.0 * n);
        const std::complex<double> s{-std::sinh(mu) * std::sin(theta), std::cosh(mu) * std::cos(theta)};
        const std::complex<double> p = s * warped;
        return (2.0 * fs + p) / (2.0 * fs - p);
    };

    std::vector<Biquad> sos;
    for (int k = 0; k < n / 2; ++k) {
        const auto z = digital_pole(k);
        Biquad q;
        q.a = {1.0, -2.0 * z.real(), std::norm(z)};
        const double g = (q.a[0] + q.a[1] + q.a[2]) / 4.0;
        q.b = {g, 2.0 * g, g};
        sos.push_back(q);
    }
    if (n % 2 == 1) {
        const double z = digital_pole(n / 2).real();
        Biquad q;
        q.a = {1.0, -z, 0.0};
        const double g = (1.0 - z) / 2.0;
        q.b = {g, g, 0.0};
        sos.push_back(q);
    }
    return sos;
}

namespace {

struct SectionState {
    double z1 = 0.0;
    double z2 = 0.0;
};

void run_cascade(std::span<const Biquad> sos, std::vector<SectionState> state, std::vector<double>& x) {
    for (std::size_t s = 0; s < sos.size(); ++s) {
        const auto& q = sos[s];
        auto [z1, z2] = state[s];
        for (double& v : x) {
            const double y = q.b[0] * v + z1;
            z1 = q.b[1] * v - q.a[1] * y + z2;
            z2 = q.b[2] * v - q.a[2] * y;
            v = y;
        }
    }
}

// Steady-state state of each section for a unit step at the cascade input.
std::vector<SectionState> step_state(std::span<const Biquad> sos) {
    std::vector<SectionState> out;
    double level = 1.0;
    for (const auto& q : sos) {
        const double g = (q.b[0] + q.b[1] + q.b[2]) / (q.a[0] + q.a[1] + q.a[2]);
        const double y = g * level;
        out.push_back({y - q.b[0] * level, q.b[2] * level - q.a[2] * y});
        level = y;
    }
    return out;
}

std::vector<SectionState> scaled(std::vector<SectionState> st, double k) {
    for (auto& s : st) {
        s.z1 *= k;
        s.z2 *= k;
    }
    return st;
}

}  // namespace

std::vector<double> sos_filter(std::span<const Biquad> sos, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    run_cascade(sos, std::vector<SectionState>(sos.size()), y);
    return y;
}

std::vector<double> sos_filtfilt(std::span<const Biquad> sos, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    std::size_t trivial = 0;
    for (const auto& q : sos) trivial += (q.b[2] == 0.0 && q.a[2] == 0.0) ? 1 : 0;
    const std::size_t padlen = std::min(3 * (2 * sos.size() + 1 - trivial), n - 1);

    std::vector<double> ext;
    ext.reserve(n + 2 * padlen);
    for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    const auto zi = step_state(sos);
    run_cascade(sos, scaled(zi, ext.front()), ext);
    std::reverse(ext.begin(), ext.end());
    run_cascade(sos, scaled(zi, ext.front()), ext);
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + static_cast<std::ptrdiff_t>(padlen), ext.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

PpgSignal chebyshev_lowpass(const PpgSignal& sig, const ChebyshevConfig& cfg) {
    const auto sos = design_chebyshev1_lowpass(cfg, sig.sample_rate_hz());
    return sig.with_samples(sos_filtfilt(sos, sig.samples()));
}

PpgSignal moving_average(const PpgSignal& sig, int order) {
    if (order < 1) throw usage_error("moving average order must be positive");
    const std::size_t n = sig.size();
    const auto window = static_cast<std::size_t>(order) + 1;
    if (n < window) throw algorithm_error("signal shorter than moving-average window");
    const std::size_t left = static_cast<std::size_t>(order) / 2;
    const std::size_t right = static_cast<std::size_t>(order) - left;

    const auto& x = sig.samples();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= left ? i - left : 0;
        const std::size_t hi = std::min(n - 1, i + right);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += x[j];
        y[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return sig.with_samples(std::move(y));
}

PeakList find_peaks(const PpgSignal& sig, const PeakConfig& cfg) {
    if (cfg.min_distance_s < 0.0) throw usage_error("min_distance_s must be non-negative");
    if (cfg.min_prominence_frac < 0.0 || cfg.min_prominence_frac > 1.0)
        throw usage_error("min_prominence_frac must lie in [0, 1]");
    const auto& x = sig.samples();
    const std::size_t n = x.size();
    if (n < 3) return {};

    // Local maxima; a flat top counts once, at its midpoint.
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < n;) {
        if (x[i - 1] < x[i]) {
            std::size_t ahead = i + 1;
            while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
            if (x[ahead] < x[i]) {
                cand.push_back((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        ++i;
    }

    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    const double min_prom = cfg.min_prominence_frac * (*mx - *mn);
    std::vector<std::size_t> kept;
    for (std::size_t p : cand) {
        double left_min = x[p];
        for (std::size_t j = p; j-- > 0;) {
            if (x[j] > x[p]) break;
            left_min = std::min(left_min, x[j]);
        }
        double right_min = x[p];
        for (std::size_t j = p + 1; j < n; ++j) {
            if (x[j] > x[p]) break;
            right_min = std::min(right_min, x[j]);
        }
        if (x[p] - std::max(left_min, right_min) >= min_prom) kept.push_back(p);
    }

    const auto distance = static_cast<std::size_t>(std::ceil(cfg.min_distance_s * sig.sample_rate_hz()));
    if (distance > 1 && kept.size() > 1) {
        std::vector<std::size_t> order(kept.size());
        std::iota(order.begin(), order.end(), 0);
        // Tallest first; equal heights keep the later peak, as scipy does.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (x[kept[a]] != x[kept[b]]) return x[kept[a]] > x[kept[b]];
            return a > b;
        });
        std::vector<bool> alive(kept.size(), true);
        for (std::size_t idx : order) {
            if (!alive[idx]) continue;
            for (std::size_t j = idx; j-- > 0 && kept[idx] - kept[j] < distance;) alive[j] = false;
            for (std::size_t j = idx + 1; j < kept.size() && kept[j] - kept[idx] < distance; ++j) alive[j] = false;
        }
        std::vector<std::size_t> thinned;
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (alive[i]) thinned.push_back(kept[i]);
        kept = std::move(thinned);
    }
    return {std::move(kept)};
}

double parabolic_offset(std::span<const double> y, std::size_t i) {
    if (i == 0 || i + 1 >= y.size()) return 0.0;
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    if (denom == 0.0) return 0.0;
    return std::clamp(0.5 * (y[i - 1] - y[i + 1]) / denom, -0.5, 0.5);
}

double skewness(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 3) throw algorithm_error("skewness needs at least 3 values");
    const double nn = static_cast<double>(n);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / nn;
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= nn;
    m3 /= nn;
    if (m2 == 0.0) throw algorithm_error("skewness undefined for zero variance");
    const double g1 = m3 / std::pow(m2, 1.5);
    return g1 * std::sqrt(nn * (nn - 1.0)) / (nn - 2.0);
}

}  // namespace ppgid
