#include "ppgid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "ppgid/error.hpp"
#include "ppgid/signal_io.hpp"

namespace ppgid {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

PpgSignal TrialRecord::load_signal() const {
    if (inline_signal) return *inline_signal;
    return read_signal(signal_path);
}

void sort_trials(std::vector<TrialRecord>& trials) {
    std::stable_sort(trials.begin(), trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.user_label, a.trial_index) < std::tie(b.user_label, b.trial_index);
    });
}

std::vector<TrialRecord> manifest_from_json(const std::string& text, const fs::path& base_dir) {
    std::vector<TrialRecord> out;
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.is_array()) throw data_error("manifest must be a JSON array");
        for (const auto& e : j) {
            TrialRecord t;
            t.user_label = e.at("user_label").get<std::string>();
            t.trial_index = e.at("trial_index").get<int>();
            if (t.trial_index < 1) throw data_error("trial_index must be >= 1");
            if (e.contains("signal")) {
                fs::path p = e.at("signal").get<std::string>();
                t.signal_path = p.is_absolute() ? p : base_dir / p;
            } else if (e.contains("signal_inline")) {
                const auto& s = e.at("signal_inline");
                t.inline_signal.emplace(s.at("samples").get<std::vector<double>>(), s.at("sample_rate_hz").get<double>());
            } else {
                throw data_error("trial has neither 'signal' nor 'signal_inline'");
            }
            if (e.contains("ground_truth_bpm") && !e.at("ground_truth_bpm").is_null())
                t.ground_truth_bpm = e.at("ground_truth_bpm").get<double>();
            out.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed manifest: ") + e.what());
    }
    sort_trials(out);
    return out;
}

std::vector<TrialRecord> load_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw data_error("cannot open manifest " + manifest.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return manifest_from_json(ss.str(), manifest.parent_path());
}

std::string manifest_to_json(const std::vector<TrialRecord>& trials) {
    auto arr = ojson::array();
    for (const auto& t : trials) {
        ojson e;
        e["user_label"] = t.user_label;
        e["trial_index"] = t.trial_index;
        if (t.inline_signal) {
            e["signal_inline"] = {{"sample_rate_hz", t.inline_signal->sample_rate_hz()},
                                  {"samples", t.inline_signal->samples()}};
        } else {
            e["signal"] = t.signal_path.generic_string();
        }
        if (t.ground_truth_bpm) e["ground_truth_bpm"] = *t.ground_truth_bpm;
        arr.push_back(std::move(e));
    }
    return arr.dump(2) + "\n";
}

VitalsReport build_vitals_report(std::vector<VitalsRow> rows, HrMethod method) {
    VitalsReport r;
    r.method = method;
    std::map<std::string, std::pair<double, std::size_t>> acc;
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& row : rows) {
        if (!row.percent_error) {
            ++r.failed;
            continue;
        }
        auto& a = acc[row.user_label];
        a.first += *row.percent_error;
        ++a.second;
        total += *row.percent_error;
        ++count;
    }
    for (const auto& [user, a] : acc) r.per_user_mean_error[user] = a.first / static_cast<double>(a.second);
    r.overall_mean_error = count > 0 ? total / static_cast<double>(count) : std::nan("");
    r.rows = std::move(rows);
    return r;
}

VitalsReport evaluate_vitals(const std::vector<TrialRecord>& trials, HrMethod method, const VitalsConfig& cfg) {
    for (const auto& t : trials)
        if (!t.ground_truth_bpm)
            throw data_error("trial " + t.user_label + "/" + std::to_string(t.trial_index) + " has no ground truth");

    std::vector<VitalsRow> rows(trials.size());
    const auto n = static_cast<std::ptrdiff_t>(trials.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& t = trials[i];
        auto& row = rows[i];
        row.user_label = t.user_label;
        row.trial_index = t.trial_index;
        row.ground_truth_bpm = *t.ground_truth_bpm;
        try {
            const auto est = estimate_heart_rate(t.load_signal(), method, cfg);
            row.calculated_bpm = est.bpm;
            row.percent_error = percent_error(est.bpm, row.ground_truth_bpm);
        } catch (const std::exception& e) {
            row.failure = e.what();
        }
    }
    return build_vitals_report(std::move(rows), method);
}

namespace {

ojson real_or_null(std::optional<double> v) {
    return v && std::isfinite(*v) ? ojson(*v) : ojson();
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace

std::string to_json(const VitalsReport& r) {
    ojson j;
    j["method"] = to_string(r.method);
    auto rows = ojson::array();
    for (const auto& row : r.rows) {
        ojson e;
        e["user_label"] = row.user_label;
        e["trial_index"] = row.trial_index;
        e["ground_truth_bpm"] = row.ground_truth_bpm;
        e["calculated_bpm"] = real_or_null(row.calculated_bpm);
        e["percent_error"] = real_or_null(row.percent_error);
        if (!row.failure.empty()) e["failure"] = row.failure;
        rows.push_back(std::move(e));
    }
    j["rows"] = rows;
    ojson per_user = ojson::object();
    for (const auto& [u, m] : r.per_user_mean_error) per_user[u] = m;
    j["per_user_mean_error"] = per_user;
    j["overall_mean_error"] = real_or_null(r.overall_mean_error);
    j["failed"] = r.failed;
    return j.dump(2) + "\n";
}

std::string to_table(const VitalsReport& r) {
    char line[160];
    std::string out;
    auto rule = std::string(70, '-') + "\n";
    std::snprintf(line, sizeof line, "%-22s %-14s %-14s %-10s\n", "Trial", "Ground Truth", "Calculated", "Error (%)");
    out += line;
    std::snprintf(line, sizeof line, "%-22s %-14s %-14s %-10s\n", "", "(Beats/Min)", "(Beats/Min)", "");
    out += line;
    out += rule;
    std::string current;
    auto close_user = [&](const std::string& user) {
        const auto it = r.per_user_mean_error.find(user);
        const std::string avg = it == r.per_user_mean_error.end() ? "n/a" : fixed(it->second, 1) + "%";
        std::snprintf(line, sizeof line, "%-22s %-14s %-14s %-10s\n", "", "", "Average % Error", avg.c_str());
        out += line;
        out += rule;
    };
    for (const auto& row : r.rows) {
        if (!current.empty() && row.user_label != current) close_user(current);
        current = row.user_label;
        const std::string label = row.user_label + " trial " + std::to_string(row.trial_index);
        const std::string calc = row.calculated_bpm ? fixed(*row.calculated_bpm, 2) : "failed";
        const std::string err = row.percent_error ? fixed(*row.percent_error, 1) + "%" : "-";
        std::snprintf(line, sizeof line, "%-22s %-14s %-14s %-10s\n", label.c_str(),
                      fixed(row.ground_truth_bpm, 0).c_str(), calc.c_str(), err.c_str());
        out += line;
    }
    if (!current.empty()) close_user(current);
    const std::string overall = std::isfinite(r.overall_mean_error) ? fixed(r.overall_mean_error, 1) + "%" : "n/a";
    std::snprintf(line, sizeof line, "%-22s %-14s %-14s %-10s\n", "", "", "Average % Error", overall.c_str());
    out += line;
    std::snprintf(line, sizeof line, "%-22s %-14s %-14s\n", "", "", "for all users");
    out += line;
    if (r.failed > 0) out += "failed trials (excluded): " + std::to_string(r.failed) + "\n";
    return out;
}

std::vector<std::optional<double>> representative_values(const std::vector<TrialRecord>& trials,
                                                         const HumanIdConfig& cfg) {
    std::vector<std::optional<double>> out(trials.size());
    std::vector<std::string> data_failures(trials.size());
    const auto n = static_cast<std::ptrdiff_t>(trials.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = enroll(trials[i].load_signal(), trials[i].user_label, cfg).representative_value;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::algorithm) data_failures[i] = e.what();
        }
    }
    for (const auto& f : data_failures)
        if (!f.empty()) throw data_error(f);
    return out;
}

namespace {

struct UserTrials {
    std::string label;
    std::vector<std::size_t> idx;  // indices into trials, by trial_index
};

std::vector<UserTrials> group_users(const std::vector<TrialRecord>& trials) {
    std::vector<std::size_t> order(trials.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(trials[a].user_label, trials[a].trial_index) <
               std::tie(trials[b].user_label, trials[b].trial_index);
    });
    std::vector<UserTrials> users;
    for (std::size_t i : order) {
        if (users.empty() || users.back().label != trials[i].user_label) users.push_back({trials[i].user_label, {}});
        users.back().idx.push_back(i);
    }
    return users;
}

}  // namespace

AuthReport count_auth(const std::vector<TrialRecord>& trials, const std::vector<std::optional<double>>& values,
                      double threshold_frac, bool accept_when_far) {
    if (values.size() != trials.size()) throw usage_error("one representative value per trial required");
    const auto users = group_users(trials);
    if (users.size() < 2) throw data_error("auth evaluation needs at least 2 users");
    for (const auto& u : users)
        if (u.idx.size() < 2) throw data_error("user " + u.label + " has fewer than 2 trials");

    AuthReport report;
    report.threshold_frac = threshold_frac;
    for (const auto& u : users) {
        AuthUserResult res;
        res.user_label = u.label;
        const auto& base = values[u.idx.front()];
        res.baseline_value = base;
        if (!base) res.baseline_failure = "baseline trial could not be templated";

        auto accepted = [&](const std::optional<double>& v) {
            if (!base || !v) return false;
            const bool close = std::abs(*v - *base) <= threshold_frac * std::abs(*base);
            return close != accept_when_far;
        };
        for (const auto& other : users) {
            const bool genuine = other.label == u.label;
            for (std::size_t i : other.idx) {
                const bool ok = accepted(values[i]);
                if (genuine) {
                    (ok ? res.counts.tp : res.counts.fn) += 1;
                    res.untemplateable_genuine += values[i] ? 0 : 1;
                } else {
                    (ok ? res.counts.fp : res.counts.tn) += 1;
                    res.untemplateable_impostor += values[i] ? 0 : 1;
                }
            }
        }
        report.users.push_back(std::move(res));
    }
    return report;
}

AuthReport evaluate_auth(const std::vector<TrialRecord>& trials, const HumanIdConfig& cfg) {
    return count_auth(trials, representative_values(trials, cfg), cfg.threshold_frac, cfg.accept_when_far);
}

RelativeDifferences relative_differences(const std::vector<TrialRecord>& trials,
                                         const std::vector<std::optional<double>>& values) {
    RelativeDifferences out;
    const auto users = group_users(trials);
    for (const auto& u : users) {
        const auto& base = values[u.idx.front()];
        if (!base || *base == 0.0) continue;
        for (const auto& other : users) {
            for (std::size_t i : other.idx) {
                if (!values[i]) continue;
                const double rel = std::abs(*values[i] - *base) / std::abs(*base);
                (other.label == u.label ? out.genuine : out.impostor).push_back(rel);
            }
        }
    }
    return out;
}

std::string to_json(const AuthReport& r) {
    ojson j;
    j["threshold_frac"] = r.threshold_frac;
    j["note"] = "genuine comparisons include the baseline trial compared with itself";
    auto users = ojson::array();
    for (const auto& u : r.users) {
        ojson e;
        e["user_label"] = u.user_label;
        e["baseline_value"] = real_or_null(u.baseline_value);
        e["tp"] = u.counts.tp;
        e["fn"] = u.counts.fn;
        e["fp"] = u.counts.fp;
        e["tn"] = u.counts.tn;
        e["untemplateable_genuine"] = u.untemplateable_genuine;
        e["untemplateable_impostor"] = u.untemplateable_impostor;
        if (!u.baseline_failure.empty()) e["baseline_failure"] = u.baseline_failure;
        users.push_back(std::move(e));
    }
    j["users"] = users;
    return j.dump(2) + "\n";
}

std::string to_table(const AuthReport& r) {
    char line[160];
    std::string out = "threshold_frac = " + fixed(r.threshold_frac, 2) + "\n";
    std::snprintf(line, sizeof line, "%-16s %12s %5s %5s %5s %5s\n", "User", "Baseline", "TP", "FN", "FP", "TN");
    out += line;
    out += std::string(54, '-') + "\n";
    for (const auto& u : r.users) {
        const std::string base = u.baseline_value ? fixed(*u.baseline_value, 4) : "n/a";
        std::snprintf(line, sizeof line, "%-16s %12s %5zu %5zu %5zu %5zu\n", u.user_label.c_str(), base.c_str(),
                      u.counts.tp, u.counts.fn, u.counts.fp, u.counts.tn);
        out += line;
    }
    return out;
}

std::vector<double> resample_linear(std::span<const double> x, std::size_t n) {
    if (x.empty() || n == 0) return {};
    if (n == 1 || x.size() == 1) return std::vector<double>(n, x.front());
    std::vector<double> out(n);
    const double step = static_cast<double>(x.size() - 1) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = step * static_cast<double>(i);
        const auto k = std::min(static_cast<std::size_t>(pos), x.size() - 2);
        const double frac = pos - static_cast<double>(k);
        out[i] = x[k] + frac * (x[k + 1] - x[k]);
    }
    return out;
}

DlExport export_dl(const std::vector<TrialRecord>& trials, std::optional<std::size_t> length) {
    if (trials.empty()) throw data_error("export needs at least one trial");
    std::vector<PpgSignal> signals;
    signals.reserve(trials.size());
    for (const auto& t : trials) signals.push_back(t.load_signal());
    const double fs = signals.front().sample_rate_hz();
    for (const auto& s : signals)
        if (s.sample_rate_hz() != fs) throw data_error("export requires a common sample rate");

    std::size_t len = length.value_or(0);
    if (!length) {
        len = signals.front().size();
        for (const auto& s : signals) len = std::min(len, s.size());
    }
    if (len < 2) throw usage_error("export length must be at least 2");

    std::string csv = "label";
    for (std::size_t i = 0; i < len; ++i) csv += ",x" + std::to_string(i);
    csv += '\n';
    auto adjustments = ojson::array();
    auto labels = ojson::array();
    auto trial_idx = ojson::array();
    for (std::size_t r = 0; r < trials.size(); ++r) {
        const auto& x = signals[r].samples();
        std::vector<double> v;
        std::string how = "none";
        if (x.size() > len) {
            v.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len));
            how = "truncated";
        } else if (x.size() < len) {
            v = resample_linear(x, len);
            how = "resampled";
        } else {
            v = x;
        }
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(len);
        double var = 0.0;
        for (double s : v) var += (s - mean) * (s - mean);
        const double sd = std::sqrt(var / static_cast<double>(len));
        csv += trials[r].user_label;
        for (double s : v) {
            csv += ',';
            csv += format_real(sd > 0.0 ? (s - mean) / sd : 0.0);
        }
        csv += '\n';
        labels.push_back(trials[r].user_label);
        trial_idx.push_back(trials[r].trial_index);
        adjustments.push_back({{"original_length", x.size()}, {"adjustment", how}, {"zero_variance", !(sd > 0.0)}});
    }
    ojson meta;
    meta["n_trials"] = trials.size();
    meta["signal_len"] = len;
    meta["sample_rate_hz"] = fs;
    meta["labels"] = labels;
    meta["trial_indices"] = trial_idx;
    meta["normalization"] = "per-trial z-score (population standard deviation)";
    meta["length_rule"] = "longer trials truncated to signal_len; shorter trials linearly resampled to signal_len";
    meta["trials"] = adjustments;
    return {csv, meta.dump(2) + "\n"};
}

}  // namespace ppgid
