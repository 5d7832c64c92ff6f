#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppgid/human_id.hpp"
#include "ppgid/signal.hpp"
#include "ppgid/vitals.hpp"

namespace ppgid {

/// One capture in an evaluation manifest. The signal is either a file
/// (resolved relative to the manifest) or carried inline.
struct TrialRecord {
    std::string user_label;
    int trial_index = 1;
    std::filesystem::path signal_path;
    std::optional<PpgSignal> inline_signal;
    std::optional<double> ground_truth_bpm;

    PpgSignal load_signal() const;
};

/// Manifest: JSON array of `{user_label, trial_index, signal | signal_inline,
/// ground_truth_bpm?}`. Returned sorted by (user_label, trial_index).
std::vector<TrialRecord> load_manifest(const std::filesystem::path& manifest);
std::vector<TrialRecord> manifest_from_json(const std::string& text, const std::filesystem::path& base_dir);
std::string manifest_to_json(const std::vector<TrialRecord>& trials);

void sort_trials(std::vector<TrialRecord>& trials);

struct VitalsRow {
    std::string user_label;
    int trial_index = 1;
    double ground_truth_bpm = 0.0;
    std::optional<double> calculated_bpm;
    std::optional<double> percent_error;
    std::string failure;  // set when the estimator failed
};

struct VitalsReport {
    HrMethod method = HrMethod::basic;
    std::vector<VitalsRow> rows;
    std::map<std::string, double> per_user_mean_error;
    double overall_mean_error = 0.0;
    std::size_t failed = 0;
};

/// Fills the means from `rows`. Failed rows are counted, not averaged.
VitalsReport build_vitals_report(std::vector<VitalsRow> rows, HrMethod method);

VitalsReport evaluate_vitals(const std::vector<TrialRecord>& trials, HrMethod method, const VitalsConfig& cfg = {});

std::string to_json(const VitalsReport& r);
/// Per-user blocks of Trial / Ground Truth / Calculated / Error rows, each
/// closed by the user's average, then the average over all users.
std::string to_table(const VitalsReport& r);

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct AuthUserResult {
    std::string user_label;
    std::optional<double> baseline_value;
    ConfusionCounts counts;
    std::size_t untemplateable_genuine = 0;
    std::size_t untemplateable_impostor = 0;
    std::string baseline_failure;
};

struct AuthReport {
    double threshold_frac = 0.0;
    std::vector<AuthUserResult> users;
};

/// Representative value per trial (same order as `trials`); empty where the
/// signal cannot be templated.
std::vector<std::optional<double>> representative_values(const std::vector<TrialRecord>& trials,
                                                         const HumanIdConfig& cfg);

/// Genuine/impostor protocol over precomputed representative values. Each
/// user's baseline is their lowest-numbered trial; genuine comparisons are all
/// of the user's trials (baseline included), impostor comparisons are all
/// trials of every other user. Untemplateable probes count as rejections.
AuthReport count_auth(const std::vector<TrialRecord>& trials, const std::vector<std::optional<double>>& values,
                      double threshold_frac, bool accept_when_far = false);

AuthReport evaluate_auth(const std::vector<TrialRecord>& trials, const HumanIdConfig& cfg);

/// Relative differences |v - baseline| / |baseline| split into genuine and
/// impostor comparisons, pooled over users; input for choose_threshold.
struct RelativeDifferences {
    std::vector<double> genuine;
    std::vector<double> impostor;
};
RelativeDifferences relative_differences(const std::vector<TrialRecord>& trials,
                                         const std::vector<std::optional<double>>& values);

std::string to_json(const AuthReport& r);
std::string to_table(const AuthReport& r);

/// Fixed-length export of per-trial z-scored signals for the deep-learning
/// component. Length is `length` when given, else the shortest trial; longer
/// trials are truncated, shorter ones linearly resampled onto `length` points.
struct DlExport {
    std::string matrix_csv;
    std::string metadata_json;
};
DlExport export_dl(const std::vector<TrialRecord>& trials, std::optional<std::size_t> length = std::nullopt);

/// Linear resampling of `x` onto `n` evenly spaced points spanning the same
/// first-to-last sample interval.
std::vector<double> resample_linear(std::span<const double> x, std::size_t n);

}  // namespace ppgid
