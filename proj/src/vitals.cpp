#include "ppgid/vitals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "ppgid/error.hpp"

namespace ppgid {

std::string to_string(HrMethod m) { return m == HrMethod::basic ? "basic" : "ensemble"; }

HrMethod hr_method_from_string(const std::string& s) {
    if (s == "basic") return HrMethod::basic;
    if (s == "ensemble") return HrMethod::ensemble;
    throw usage_error("unknown heart-rate method '" + s + "'");
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> intervals_s(std::span<const double> positions, double fs) {
    std::vector<double> out;
    for (std::size_t i = 1; i < positions.size(); ++i) out.push_back((positions[i] - positions[i - 1]) / fs);
    return out;
}

struct Branch {
    PeakList peaks;
    std::vector<double> positions;
};

Branch locate_beats(const PpgSignal& filtered, const VitalsConfig& cfg) {
    Branch b;
    b.peaks = find_peaks(filtered, cfg.peaks);
    if (cfg.refine_peaks) {
        b.positions = refined_positions(b.peaks, filtered);
    } else {
        for (std::size_t i : b.peaks.indices) b.positions.push_back(static_cast<double>(i));
    }
    return b;
}

// Skewness of beat intervals (seconds). A spread below `floor_s`, or at
// rounding level, means regular timing and is reported as zero skew.
double interval_skewness(std::span<const double> intervals, double floor_s) {
    if (intervals.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    const double mean = std::accumulate(intervals.begin(), intervals.end(), 0.0) / static_cast<double>(intervals.size());
    double var = 0.0;
    for (double v : intervals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(intervals.size());
    const double sd = std::sqrt(var);
    if (sd <= 1e-9 * std::abs(mean) || sd < floor_s) return 0.0;
    return skewness(intervals);
}

}  // namespace

double heart_rate_from_positions(std::span<const double> positions, double fs) {
    if (positions.size() < 2) throw algorithm_error("insufficient peaks");
    if (!(fs > 0.0)) throw usage_error("sample rate must be positive");
    const double med = median(intervals_s(positions, fs));
    if (!(med > 0.0)) throw algorithm_error("non-increasing peak positions");
    return 60.0 / med;
}

double heart_rate_from_peaks(const PeakList& peaks, double fs) {
    std::vector<double> pos(peaks.indices.begin(), peaks.indices.end());
    return heart_rate_from_positions(pos, fs);
}

double heart_rate_from_peaks(const PeakList& peaks, const PpgSignal& sig) {
    return heart_rate_from_positions(refined_positions(peaks, sig), sig.sample_rate_hz());
}

std::vector<double> refined_positions(const PeakList& peaks, const PpgSignal& sig) {
    std::vector<double> out;
    out.reserve(peaks.size());
    for (std::size_t i : peaks.indices) out.push_back(static_cast<double>(i) + parabolic_offset(sig.samples(), i));
    return out;
}

HeartRateEstimate estimate_heart_rate_basic(const PpgSignal& sig, const VitalsConfig& cfg) {
    if (sig.is_flat()) throw algorithm_error("insufficient peaks (flat signal)");
    const auto filtered = chebyshev_lowpass(detrend(sig, cfg.detrend_order), cfg.lowpass);
    const auto beats = locate_beats(filtered, cfg);
    HeartRateEstimate est;
    est.method = HrMethod::basic;
    est.peak_count = beats.peaks.size();
    est.bpm = heart_rate_from_positions(beats.positions, sig.sample_rate_hz());
    return est;
}

HeartRateEstimate estimate_heart_rate_ensemble(const PpgSignal& sig, const VitalsConfig& cfg) {
    if (sig.is_flat()) throw algorithm_error("insufficient peaks (flat signal)");
    const auto detrended = detrend(sig, cfg.detrend_order);
    const double fs = sig.sample_rate_hz();
    constexpr std::size_t kBranches = std::tuple_size_v<decltype(cfg.ensemble_orders)>;

    std::array<double, kBranches> bpm;
    std::array<std::vector<double>, kBranches> branch_intervals;
    std::array<std::size_t, kBranches> branch_peaks{};
    bpm.fill(std::numeric_limits<double>::quiet_NaN());

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(kBranches); ++k) {
        if (detrended.size() < static_cast<std::size_t>(cfg.ensemble_orders[k]) + 1) continue;
        const auto beats = locate_beats(moving_average(detrended, cfg.ensemble_orders[k]), cfg);
        branch_peaks[k] = beats.peaks.size();
        if (beats.positions.size() < 2) continue;
        branch_intervals[k] = intervals_s(beats.positions, fs);
        bpm[k] = 60.0 / median(branch_intervals[k]);
    }

    HeartRateEstimate est;
    est.method = HrMethod::ensemble;
    est.per_filter_bpm.assign(bpm.begin(), bpm.end());

    std::vector<double> pooled;
    double sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t k = 0; k < kBranches; ++k) {
        if (std::isnan(bpm[k])) continue;
        pooled.insert(pooled.end(), branch_intervals[k].begin(), branch_intervals[k].end());
        sum += bpm[k];
        ++ok;
    }
    if (ok == 0) throw algorithm_error("insufficient peaks");

    est.skewness = interval_skewness(pooled, cfg.interval_resolution_samples / fs);
    est.quality_good = std::abs(est.skewness) < cfg.skewness_threshold;
    if (est.quality_good) {
        est.bpm = sum / static_cast<double>(ok);
    } else {
        // The lowest-order branch that produced a rate, normally order 2.
        const auto first = std::find_if(bpm.begin(), bpm.end(), [](double v) { return !std::isnan(v); });
        est.bpm = *first;
    }
    const auto first_ok = static_cast<std::size_t>(
        std::find_if(bpm.begin(), bpm.end(), [](double v) { return !std::isnan(v); }) - bpm.begin());
    est.peak_count = branch_peaks[first_ok];
    return est;
}

HeartRateEstimate estimate_heart_rate(const PpgSignal& sig, HrMethod method, const VitalsConfig& cfg) {
    return method == HrMethod::basic ? estimate_heart_rate_basic(sig, cfg) : estimate_heart_rate_ensemble(sig, cfg);
}

double percent_error(double estimate_bpm, double ground_truth_bpm) {
    if (!(ground_truth_bpm > 0.0)) throw usage_error("ground truth must be positive");
    return 100.0 * std::abs(estimate_bpm - ground_truth_bpm) / ground_truth_bpm;
}

std::string to_json(const HeartRateEstimate& e) {
    auto real_or_null = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["bpm"] = e.bpm;
    j["method"] = to_string(e.method);
    if (e.method == HrMethod::ensemble) {
        auto arr = nlohmann::ordered_json::array();
        for (double v : e.per_filter_bpm) arr.push_back(real_or_null(v));
        j["per_filter_bpm"] = arr;
        j["skewness"] = real_or_null(e.skewness);
        j["quality_good"] = e.quality_good;
    } else {
        j["per_filter_bpm"] = nullptr;
        j["skewness"] = nullptr;
        j["quality_good"] = nullptr;
    }
    j["peak_count"] = e.peak_count;
    return j.dump(2) + "\n";
}

}  // namespace ppgid
