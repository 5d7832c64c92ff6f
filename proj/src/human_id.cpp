#include "ppgid/human_id.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "ppgid/error.hpp"

namespace ppgid {

std::vector<Wave> extract_waves(const PpgSignal& sig, const PeakList& peaks, int half_width) {
    if (half_width < 1) throw usage_error("half_width must be at least 1");
    const auto hw = static_cast<std::size_t>(half_width);
    std::vector<Wave> waves;
    for (std::size_t p : peaks.indices) {
        if (p < hw || p + hw >= sig.size()) continue;
        Wave w;
        w.center_peak_index = p;
        w.samples.assign(sig.samples().begin() + static_cast<std::ptrdiff_t>(p - hw),
                         sig.samples().begin() + static_cast<std::ptrdiff_t>(p + hw + 1));
        waves.push_back(std::move(w));
    }
    return waves;
}

Wave mean_wave(std::span<const Wave> waves) {
    if (waves.empty()) throw algorithm_error("mean of zero waves");
    const std::size_t len = waves.front().samples.size();
    Wave out;
    out.samples.assign(len, 0.0);
    for (const auto& w : waves) {
        if (w.samples.size() != len) throw algorithm_error("waves differ in length");
        for (std::size_t i = 0; i < len; ++i) out.samples[i] += w.samples[i];
    }
    for (double& v : out.samples) v /= static_cast<double>(waves.size());
    out.center_peak_index = waves[waves.size() / 2].center_peak_index;
    return out;
}

namespace {

std::vector<double> zscore(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) throw algorithm_error("zero-variance wave");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
    return out;
}

}  // namespace

Matrix wave_correlations(std::span<const Wave> waves, const Wave& mean) {
    if (waves.empty()) throw algorithm_error("no waves to correlate");
    const std::size_t len = mean.samples.size();
    Matrix normalized(waves.size(), len);
    for (std::size_t r = 0; r < waves.size(); ++r) {
        if (waves[r].samples.size() != len) throw algorithm_error("waves differ in length");
        const auto z = zscore(waves[r].samples);
        std::copy(z.begin(), z.end(), normalized.row(r).begin());
    }
    return kernels::cross_correlate_rows(normalized, zscore(mean.samples));
}

std::vector<double> human_id_signal(const Matrix& corr) {
    if (corr.rows == 0) throw algorithm_error("empty correlation matrix");
    return kernels::column_min(corr);
}

HumanIdTemplate enroll(const PpgSignal& sig, const std::string& user_label, const HumanIdConfig& cfg) {
    if (sig.is_flat()) throw algorithm_error("< 3 waves (flat signal)");
    const auto filtered = chebyshev_lowpass(detrend(sig, cfg.detrend_order), cfg.filter);
    const auto peaks = find_peaks(filtered, cfg.peaks);
    const auto waves = extract_waves(filtered, peaks, cfg.half_width);
    if (waves.size() < 3)
        throw algorithm_error("< 3 waves (" + std::to_string(waves.size()) + " usable peaks)");

    HumanIdTemplate t;
    t.id_signal = human_id_signal(wave_correlations(waves, mean_wave(waves)));
    t.representative_value = *std::max_element(t.id_signal.begin(), t.id_signal.end());
    t.user_label = user_label;
    t.config = cfg;
    return t;
}

std::string to_string(AuthStatus s) {
    switch (s) {
        case AuthStatus::accepted: return "accepted";
        case AuthStatus::rejected: return "rejected";
        case AuthStatus::untemplateable: return "rejected: untemplateable";
    }
    return "rejected";
}

AuthDecision verify(const HumanIdTemplate& tmpl, const PpgSignal& probe) {
    AuthDecision d;
    d.baseline_value = tmpl.representative_value;
    d.threshold = tmpl.config.threshold_frac * std::abs(tmpl.representative_value);
    try {
        d.probe_value = enroll(probe, tmpl.user_label, tmpl.config).representative_value;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::algorithm) throw;
        d.status = AuthStatus::untemplateable;
        d.probe_value = std::nan("");
        d.abs_difference = std::nan("");
        d.reason = e.what();
        return d;
    }
    d.abs_difference = std::abs(d.probe_value - d.baseline_value);
    const bool close = d.abs_difference <= d.threshold;
    d.status = close != tmpl.config.accept_when_far ? AuthStatus::accepted : AuthStatus::rejected;
    return d;
}

std::vector<double> threshold_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 50; ++i) g.push_back(i / 100.0);
    return g;
}

double choose_threshold(std::span<const double> genuine, std::span<const double> impostor) {
    if (genuine.empty() || impostor.empty()) throw usage_error("choose_threshold needs genuine and impostor values");
    double best = 0.0;
    long best_score = 0;
    bool first = true;
    for (double t : threshold_grid()) {
        const long tp = std::count_if(genuine.begin(), genuine.end(), [&](double v) { return v <= t; });
        const long fp = std::count_if(impostor.begin(), impostor.end(), [&](double v) { return v <= t; });
        if (first || tp - fp > best_score) {
            best = t;
            best_score = tp - fp;
            first = false;
        }
    }
    return best;
}

namespace {

nlohmann::ordered_json config_json(const HumanIdConfig& c) {
    nlohmann::ordered_json j;
    j["half_width"] = c.half_width;
    j["threshold_frac"] = c.threshold_frac;
    j["filter"] = {{"order", c.filter.order}, {"cutoff_hz", c.filter.cutoff_hz}, {"ripple_db", c.filter.ripple_db}};
    j["accept_when_far"] = c.accept_when_far;
    return j;
}

}  // namespace

std::string to_json(const HumanIdTemplate& t) {
    nlohmann::ordered_json j;
    j["user_label"] = t.user_label;
    j["representative_value"] = t.representative_value;
    j["id_signal"] = t.id_signal;
    j["config"] = config_json(t.config);
    j["format_version"] = t.format_version;
    return j.dump(2) + "\n";
}

HumanIdTemplate template_from_json(const std::string& text) {
    HumanIdTemplate t;
    try {
        const auto j = nlohmann::json::parse(text);
        t.user_label = j.at("user_label").get<std::string>();
        t.representative_value = j.at("representative_value").get<double>();
        t.id_signal = j.at("id_signal").get<std::vector<double>>();
        t.format_version = j.at("format_version").get<int>();
        const auto& c = j.at("config");
        t.config.half_width = c.at("half_width").get<int>();
        t.config.threshold_frac = c.at("threshold_frac").get<double>();
        const auto& f = c.at("filter");
        t.config.filter.order = f.at("order").get<int>();
        t.config.filter.cutoff_hz = f.at("cutoff_hz").get<double>();
        t.config.filter.ripple_db = f.at("ripple_db").get<double>();
        t.config.accept_when_far = c.value("accept_when_far", false);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("invalid template: ") + e.what());
    }
    if (t.format_version != kTemplateFormatVersion) throw data_error("invalid template: unsupported format_version");
    if (t.config.half_width < 1) throw data_error("invalid template: half_width must be at least 1");
    if (!(t.config.threshold_frac > 0.0 && t.config.threshold_frac < 1.0))
        throw data_error("invalid template: threshold_frac must lie in (0, 1)");
    const auto expected_len = static_cast<std::size_t>(2 * (2 * t.config.half_width + 1) - 1);
    if (t.id_signal.size() != expected_len) throw data_error("invalid template: id_signal length mismatch");
    if (*std::max_element(t.id_signal.begin(), t.id_signal.end()) != t.representative_value)
        throw data_error("invalid template: representative_value is not the id_signal peak");
    return t;
}

std::string to_json(const AuthDecision& d) {
    auto real_or_null = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["accepted"] = d.accepted();
    j["status"] = to_string(d.status);
    j["probe_value"] = real_or_null(d.probe_value);
    j["baseline_value"] = d.baseline_value;
    j["abs_difference"] = real_or_null(d.abs_difference);
    j["threshold"] = d.threshold;
    if (!d.reason.empty()) j["reason"] = d.reason;
    return j.dump(2) + "\n";
}

}  // namespace ppgid
