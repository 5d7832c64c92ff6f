#pragma once

#include <span>
#include <string>
#include <vector>

#include "ppgid/kernels.hpp"
#include "ppgid/signal.hpp"
#include "ppgid/signal_processing.hpp"

namespace ppgid {

struct HumanIdConfig {
    int half_width = 5;
    double threshold_frac = 0.1;
    ChebyshevConfig filter{2, 3.0, 0.5};
    int detrend_order = 2;
    PeakConfig peaks{};
    /// Accept when the representative values differ by MORE than the
    /// threshold instead of less. Off by default.
    bool accept_when_far = false;

    friend bool operator==(const HumanIdConfig&, const HumanIdConfig&) = default;
};

/// Excerpt of 2*half_width+1 samples centred on a peak.
struct Wave {
    std::vector<double> samples;
    std::size_t center_peak_index = 0;
};

/// One wave per peak that has `half_width` samples on both sides, in peak order.
std::vector<Wave> extract_waves(const PpgSignal& sig, const PeakList& peaks, int half_width);

Wave mean_wave(std::span<const Wave> waves);

/// Rows: waves; columns: lags -(L-1)..(L-1). Each wave and the mean are
/// z-scored first and every lag sum is divided by L, so the zero-lag value of
/// a wave against itself is 1.
Matrix wave_correlations(std::span<const Wave> waves, const Wave& mean);

/// Per-lag minimum over all rows.
std::vector<double> human_id_signal(const Matrix& corr);

inline constexpr int kTemplateFormatVersion = 1;

struct HumanIdTemplate {
    std::vector<double> id_signal;
    double representative_value = 0.0;
    std::string user_label;
    HumanIdConfig config{};
    int format_version = kTemplateFormatVersion;
};

/// detrend -> Chebyshev low-pass -> peaks -> waves -> mean -> correlations
/// -> per-lag minimum -> maximum. Needs at least 3 waves.
HumanIdTemplate enroll(const PpgSignal& sig, const std::string& user_label, const HumanIdConfig& cfg = {});

enum class AuthStatus { accepted, rejected, untemplateable };

std::string to_string(AuthStatus s);

struct AuthDecision {
    AuthStatus status = AuthStatus::rejected;
    double probe_value = 0.0;
    double baseline_value = 0.0;
    double abs_difference = 0.0;
    double threshold = 0.0;
    std::string reason;

    bool accepted() const noexcept { return status == AuthStatus::accepted; }
};

AuthDecision verify(const HumanIdTemplate& tmpl, const PpgSignal& probe);

/// Threshold fractions swept by choose_threshold: 0.01, 0.02, ..., 0.50.
std::vector<double> threshold_grid();

/// Relative differences |probe - baseline| / |baseline| for genuine and
/// impostor comparisons. Returns the grid value maximising TP - FP, where a
/// comparison counts as accepted when its difference is within the threshold.
/// Ties go to the smaller threshold.
double choose_threshold(std::span<const double> genuine_rel_diffs, std::span<const double> impostor_rel_diffs);

std::string to_json(const HumanIdTemplate& t);
HumanIdTemplate template_from_json(const std::string& text);
std::string to_json(const AuthDecision& d);

}  // namespace ppgid
