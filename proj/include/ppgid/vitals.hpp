#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ppgid/signal.hpp"
#include "ppgid/signal_processing.hpp"

namespace ppgid {

enum class HrMethod { basic, ensemble };

std::string to_string(HrMethod m);
HrMethod hr_method_from_string(const std::string& s);

struct VitalsConfig {
    int detrend_order = 2;
    ChebyshevConfig lowpass{6, 3.0, 0.5};
    PeakConfig peaks{};
    std::array<int, 5> ensemble_orders{2, 3, 4, 5, 6};
    double skewness_threshold = 0.13;
    /// Pooled intervals whose standard deviation is below this many sample
    /// periods are treated as perfectly regular (skewness 0): their shape is
    /// sampling-grid artefact. 0 disables the floor.
    double interval_resolution_samples = 0.5;
    bool refine_peaks = true;
};

struct HeartRateEstimate {
    double bpm = 0.0;
    HrMethod method = HrMethod::basic;
    /// Ensemble only: one entry per moving-average order, NaN where the branch
    /// found fewer than two peaks.
    std::vector<double> per_filter_bpm;
    double skewness = 0.0;
    bool quality_good = false;
    std::size_t peak_count = 0;
};

/// 60 / median inter-peak interval, peaks given as (possibly fractional)
/// sample positions.
double heart_rate_from_positions(std::span<const double> positions, double sample_rate_hz);

/// Integer peak indices, no refinement.
double heart_rate_from_peaks(const PeakList& peaks, double sample_rate_hz);

/// Peak indices refined by parabolic interpolation on `sig`.
double heart_rate_from_peaks(const PeakList& peaks, const PpgSignal& sig);

std::vector<double> refined_positions(const PeakList& peaks, const PpgSignal& sig);

HeartRateEstimate estimate_heart_rate_basic(const PpgSignal& sig, const VitalsConfig& cfg = {});
HeartRateEstimate estimate_heart_rate_ensemble(const PpgSignal& sig, const VitalsConfig& cfg = {});
HeartRateEstimate estimate_heart_rate(const PpgSignal& sig, HrMethod method, const VitalsConfig& cfg = {});

double percent_error(double estimate_bpm, double ground_truth_bpm);

/// `{bpm, method, per_filter_bpm, skewness, quality_good, peak_count}`.
std::string to_json(const HeartRateEstimate& e);

}  // namespace ppgid
