#pragma once

#include <array>
#include <span>
#include <vector>

#include "ppgid/signal.hpp"

namespace ppgid {

/// Subtracts the least-squares polynomial of degree `poly_order`.
PpgSignal detrend(const PpgSignal& sig, int poly_order);

/// One biquad in transposed direct form II, a0 normalised to 1.
struct Biquad {
    std::array<double, 3> b{};
    std::array<double, 3> a{1.0, 0.0, 0.0};
};

struct ChebyshevConfig {
    int order = 6;
    double cutoff_hz = 3.0;
    double ripple_db = 0.5;

    friend bool operator==(const ChebyshevConfig&, const ChebyshevConfig&) = default;
};

/// Chebyshev type I low-pass as second-order sections. Poles come from the
/// analog prototype prewarped to `cutoff_hz` and mapped with the bilinear
/// transform; each section is scaled to unit gain at DC.
std::vector<Biquad> design_chebyshev1_lowpass(const ChebyshevConfig& cfg, double sample_rate_hz);

/// Single causal pass through the cascade with zero initial state.
std::vector<double> sos_filter(std::span<const Biquad> sos, std::span<const double> x);

/// Forward-backward application with odd-reflection padding and steady-state
/// initial conditions, so the net phase is zero.
std::vector<double> sos_filtfilt(std::span<const Biquad> sos, std::span<const double> x);

PpgSignal chebyshev_lowpass(const PpgSignal& sig, const ChebyshevConfig& cfg);

/// Centered equal-weight FIR of order `order` (window `order + 1`). For even
/// windows the extra tap sits on the right. Edge windows shrink to the
/// available samples.
PpgSignal moving_average(const PpgSignal& sig, int order);

struct PeakConfig {
    double min_distance_s = 0.33;
    double min_prominence_frac = 0.2;

    friend bool operator==(const PeakConfig&, const PeakConfig&) = default;
};

/// Local maxima (plateaus resolved to their midpoint) whose prominence is at
/// least `min_prominence_frac` of the signal range, thinned tallest-first so
/// that survivors are at least ceil(min_distance_s * fs) samples apart.
PeakList find_peaks(const PpgSignal& sig, const PeakConfig& cfg = {});

/// Vertex offset in [-0.5, 0.5] of the parabola through samples i-1, i, i+1.
/// Zero at the signal edges or when the three samples are collinear.
double parabolic_offset(std::span<const double> samples, std::size_t i);

/// Adjusted Fisher-Pearson sample skewness G1.
double skewness(std::span<const double> values);

}  // namespace ppgid
