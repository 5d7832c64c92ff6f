#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppgid/error.hpp"
#include "ppgid/eval.hpp"
#include "ppgid/frame_ingest.hpp"
#include "ppgid/human_id.hpp"
#include "ppgid/signal_io.hpp"
#include "ppgid/synth.hpp"
#include "ppgid/vitals.hpp"

namespace fs = std::filesystem;

namespace ppgid::cli {
namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw data_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw data_error("cannot write " + p.string());
    out << text;
    if (!out) throw data_error("write failed for " + p.string());
}

std::string with_newline(std::string s) {
    if (s.empty() || s.back() != '\n') s.push_back('\n');
    return s;
}

// Sends `text` to the file if one was named, else to `out`.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << with_newline(text);
    else
        write_text(path, with_newline(text));
}

template <class T>
T parse_number(std::string_view s, const char* what) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw usage_error(std::string("bad ") + what + ": '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

RoiSpec parse_roi(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 4) throw usage_error("--roi expects x,y,w,h or auto");
    return {parse_number<std::uint32_t>(parts[0], "roi"), parse_number<std::uint32_t>(parts[1], "roi"),
            parse_number<std::uint32_t>(parts[2], "roi"), parse_number<std::uint32_t>(parts[3], "roi")};
}

FrameFormat frame_format_for(const fs::path& p, const std::string& flag) {
    if (flag == "dir") return FrameFormat::image_directory;
    if (flag == "raw") return FrameFormat::raw_container;
    return fs::is_directory(p) ? FrameFormat::image_directory : FrameFormat::raw_container;
}

struct Globals {
    std::optional<double> sample_rate;
    std::string output_format = "json";
    std::uint64_t seed = 1;
    bool seed_given = false;
};

struct ExtractArgs {
    std::string frames, format = "auto", roi, reduction = "sum", out;
};

void cmd_extract(const ExtractArgs& a, const Globals& g, std::ostream& out) {
    std::optional<RoiSpec> explicit_roi;
    if (!a.roi.empty() && a.roi != "auto") explicit_roi = parse_roi(a.roi);
    const auto seq = load_frames(a.frames, frame_format_for(a.frames, a.format), g.sample_rate);
    const RoiSpec roi = explicit_roi ? *explicit_roi : a.roi.empty() ? RoiSpec::full(seq) : auto_roi(seq);
    const auto sig = extract_ppg(crop(seq, roi), a.reduction == "mean" ? Reduction::mean : Reduction::sum);
    if (!a.out.empty()) {
        write_signal(sig, a.out);
        return;
    }
    if (g.output_format == "table") throw usage_error("extract prints json or csv");
    out << (g.output_format == "csv" ? signal_to_csv(sig) : with_newline(signal_to_json(sig)));
}

struct HrArgs {
    std::string signal, method = "basic", out;
    double skew_threshold = VitalsConfig{}.skewness_threshold;
};

void cmd_hr(const HrArgs& a, const Globals& g, std::ostream& out) {
    VitalsConfig cfg;
    cfg.skewness_threshold = a.skew_threshold;
    const auto sig = read_signal(a.signal, g.sample_rate);
    emit(to_json(estimate_heart_rate(sig, hr_method_from_string(a.method), cfg)), a.out, out);
}

struct IdArgs {
    int half_width = HumanIdConfig{}.half_width;
    double threshold = HumanIdConfig{}.threshold_frac;
    bool accept_when_far = false;

    HumanIdConfig config() const {
        HumanIdConfig c;
        c.half_width = half_width;
        c.threshold_frac = threshold;
        c.accept_when_far = accept_when_far;
        return c;
    }
};

struct EnrollArgs {
    std::string signal, user, out;
    IdArgs id;
};

void cmd_enroll(const EnrollArgs& a, const Globals& g, std::ostream& out) {
    const auto sig = read_signal(a.signal, g.sample_rate);
    emit(to_json(enroll(sig, a.user, a.id.config())), a.out, out);
}

struct VerifyArgs {
    std::string tmpl, signal, out;
    std::optional<double> threshold;
};

void cmd_verify(const VerifyArgs& a, const Globals& g, std::ostream& out) {
    auto t = template_from_json(read_text(a.tmpl));
    if (a.threshold) {
        if (!(*a.threshold > 0.0 && *a.threshold < 1.0)) throw usage_error("--threshold must lie in (0, 1)");
        t.config.threshold_frac = *a.threshold;
    }
    const auto sig = read_signal(a.signal, g.sample_rate);
    emit(to_json(verify(t, sig)), a.out, out);
}

struct EvalArgs {
    std::string manifest, mode, method = "basic", threshold = "auto", out;
    IdArgs id;
};

void cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out) {
    if (g.output_format == "csv") throw usage_error("eval prints json or table");
    const auto trials = load_manifest(a.manifest);
    const bool table = g.output_format == "table";
    if (a.mode == "vitals") {
        const auto r = evaluate_vitals(trials, hr_method_from_string(a.method));
        emit(table ? to_table(r) : to_json(r), a.out, out);
        return;
    }
    auto cfg = a.id.config();
    AuthReport r;
    if (a.threshold == "auto") {
        const auto values = representative_values(trials, cfg);
        const auto diffs = relative_differences(trials, values);
        r = count_auth(trials, values, choose_threshold(diffs.genuine, diffs.impostor), cfg.accept_when_far);
    } else {
        cfg.threshold_frac = parse_number<double>(a.threshold, "threshold");
        if (!(cfg.threshold_frac > 0.0 && cfg.threshold_frac < 1.0))
            throw usage_error("--threshold must lie in (0, 1)");
        r = evaluate_auth(trials, cfg);
    }
    emit(table ? to_table(r) : to_json(r), a.out, out);
}

struct SynthArgs {
    double hr = 75.0, duration = 15.0, noise = 0.0, jitter = 0.0, phase = 0.5, alternans = 0.0, respiration = 0.0;
    std::string preset;
    std::optional<double> width, dicrotic_amp, dicrotic_delay;
    std::vector<double> drift;
    std::string out, truth_out, frames_out, frame_size = "8x8", benchmark, out_dir;
    int bit_depth = 8;
    std::uint32_t frame_margin = 0;
};

std::pair<std::uint32_t, std::uint32_t> parse_size(const std::string& s) {
    const auto parts = split(s, 'x');
    if (parts.size() != 2) throw usage_error("--frame-size expects WxH");
    return {parse_number<std::uint32_t>(parts[0], "frame size"), parse_number<std::uint32_t>(parts[1], "frame size")};
}

void write_frames(const PpgSignal& sig, const SynthArgs& a) {
    const auto [w, h] = parse_size(a.frame_size);
    const auto seq = synth_frames(sig, w, h, a.bit_depth, a.frame_margin);
    if (fs::path(a.frames_out).extension() == ".ppgf")
        save_raw_container(seq, a.frames_out);
    else
        save_image_directory(seq, a.frames_out);
}

void synth_benchmark(const SynthArgs& a, const Globals& g, std::ostream& out) {
    if (a.out_dir.empty()) throw usage_error("--benchmark needs --out-dir");
    std::vector<BenchmarkTrial> bench;
    if (a.benchmark == "vitals")
        bench = g.seed_given ? vitals_benchmark(g.seed) : vitals_benchmark();
    else if (a.benchmark == "heavy")
        bench = g.seed_given ? heavy_noise_benchmark(g.seed) : heavy_noise_benchmark();
    else
        bench = g.seed_given ? auth_benchmark(g.seed) : auth_benchmark();

    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    std::vector<TrialRecord> records;
    for (const auto& b : bench) {
        const auto res = synth_ppg(b.spec);
        TrialRecord t;
        t.user_label = b.user_label;
        t.trial_index = b.trial_index;
        t.signal_path = b.user_label + "_t" + std::to_string(b.trial_index) + ".csv";
        t.ground_truth_bpm = res.truth.true_hr_bpm;
        write_signal(res.signal, dir / t.signal_path);
        records.push_back(std::move(t));
    }
    const auto manifest = dir / "manifest.json";
    write_text(manifest, manifest_to_json(records));
    out << manifest.generic_string() << "\n";
}

void cmd_synth(const SynthArgs& a, const Globals& g, std::ostream& out) {
    if (!a.benchmark.empty()) {
        synth_benchmark(a, g, out);
        return;
    }
    SynthSpec s;
    s.hr_bpm = a.hr;
    s.duration_s = a.duration;
    s.sample_rate_hz = g.sample_rate.value_or(kDefaultFrameRateHz);
    if (!a.preset.empty()) s.morphology = morphology_preset(a.preset);
    if (a.width) s.morphology.systolic_width_frac = *a.width;
    if (a.dicrotic_amp) s.morphology.dicrotic_amplitude_frac = *a.dicrotic_amp;
    if (a.dicrotic_delay) s.morphology.dicrotic_delay_frac = *a.dicrotic_delay;
    s.drift = a.drift;
    s.noise_sigma = a.noise;
    s.hr_jitter_frac = a.jitter;
    s.phase_frac = a.phase;
    s.alternans_depth = a.alternans;
    s.respiratory_depth = a.respiration;
    s.seed = g.seed;
    const auto res = synth_ppg(s);

    if (a.out.empty() && a.frames_out.empty()) {
        if (g.output_format == "table") throw usage_error("synth prints json or csv");
        out << (g.output_format == "csv" ? signal_to_csv(res.signal) : with_newline(signal_to_json(res.signal)));
    }
    if (!a.out.empty()) write_signal(res.signal, a.out);
    if (!a.frames_out.empty()) write_frames(res.signal, a);
    if (!a.truth_out.empty()) {
        nlohmann::ordered_json j;
        j["true_hr_bpm"] = res.truth.true_hr_bpm;
        j["beat_peak_indices"] = res.truth.beat_peak_indices.indices;
        write_text(a.truth_out, j.dump(2) + "\n");
    }
}

struct ExportArgs {
    std::string manifest, out;
    std::optional<std::size_t> length;
};

void cmd_export_dl(const ExportArgs& a, std::ostream& out) {
    const auto trials = load_manifest(a.manifest);
    if (a.length && *a.length < 2) throw usage_error("--length must be at least 2");
    const auto ex = export_dl(trials, a.length);
    fs::path base = a.out;
    const auto csv = fs::path(base).replace_extension(".csv");
    const auto meta = fs::path(base).replace_extension(".json");
    write_text(csv, ex.matrix_csv);
    write_text(meta, ex.metadata_json);
    out << csv.generic_string() << "\n" << meta.generic_string() << "\n";
}

void add_id_options(CLI::App* cmd, IdArgs& id) {
    cmd->add_option("--half-width", id.half_width, "samples either side of each peak")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", id.threshold, "relative acceptance threshold");
    cmd->add_flag("--accept-when-far", id.accept_when_far, "accept when the difference exceeds the threshold");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"PPG heart rate and Human-ID toolkit", "ppgid"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--sample-rate", g.sample_rate, "sample rate (Hz) for inputs without metadata")
        ->check(CLI::PositiveNumber);
    app.add_option("--output-format", g.output_format, "json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    auto* seed_opt = app.add_option("--seed", g.seed, "synthesis seed");

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "frames to PPG signal");
    extract->add_option("frames", ex.frames, "PGM directory or .ppgf container")->required();
    extract->add_option("--format", ex.format)->check(CLI::IsMember({"auto", "dir", "raw"}));
    extract->add_option("--roi", ex.roi, "x,y,w,h or auto (default full frame)");
    extract->add_option("--reduction", ex.reduction)->check(CLI::IsMember({"sum", "mean"}));
    extract->add_option("--out", ex.out, "signal file (.csv or .json)");

    HrArgs hr;
    auto* hrc = app.add_subcommand("hr", "heart rate from a signal");
    hrc->add_option("signal", hr.signal)->required();
    hrc->add_option("--method", hr.method)->check(CLI::IsMember({"basic", "ensemble"}));
    hrc->add_option("--skew-threshold", hr.skew_threshold)->check(CLI::PositiveNumber);
    hrc->add_option("--out", hr.out);

    EnrollArgs en;
    auto* enrollc = app.add_subcommand("enroll", "build a Human-ID template");
    enrollc->add_option("signal", en.signal)->required();
    enrollc->add_option("--user", en.user)->required();
    enrollc->add_option("--out", en.out, "template file");
    add_id_options(enrollc, en.id);

    VerifyArgs ve;
    auto* verifyc = app.add_subcommand("verify", "compare a probe against a template");
    verifyc->add_option("template", ve.tmpl)->required();
    verifyc->add_option("signal", ve.signal)->required();
    verifyc->add_option("--threshold", ve.threshold, "override the template threshold");
    verifyc->add_option("--out", ve.out);

    EvalArgs ev;
    auto* evalc = app.add_subcommand("eval", "evaluate a trial manifest");
    evalc->add_option("manifest", ev.manifest)->required();
    evalc->add_option("--mode", ev.mode)->required()->check(CLI::IsMember({"vitals", "auth"}));
    evalc->add_option("--method", ev.method)->check(CLI::IsMember({"basic", "ensemble"}));
    evalc->add_option("--out", ev.out);
    evalc->add_option("--half-width", ev.id.half_width)->check(CLI::PositiveNumber);
    evalc->add_option("--threshold", ev.threshold, "auto or a fraction in (0, 1)");
    evalc->add_flag("--accept-when-far", ev.id.accept_when_far);

    SynthArgs sy;
    auto* synthc = app.add_subcommand("synth", "synthetic PPG signals, frames and benchmarks");
    synthc->add_option("--hr", sy.hr);
    synthc->add_option("--duration", sy.duration);
    synthc->add_option("--preset", sy.preset, "named pulse shape");
    synthc->add_option("--width", sy.width, "systolic width (fraction of period)");
    synthc->add_option("--dicrotic-amp", sy.dicrotic_amp);
    synthc->add_option("--dicrotic-delay", sy.dicrotic_delay);
    synthc->add_option("--drift", sy.drift, "polynomial coefficients in seconds, constant first")->delimiter(',');
    synthc->add_option("--noise", sy.noise);
    synthc->add_option("--jitter", sy.jitter);
    synthc->add_option("--phase", sy.phase);
    synthc->add_option("--alternans", sy.alternans);
    synthc->add_option("--respiration", sy.respiration);
    synthc->add_option("--out", sy.out, "signal file (.csv or .json)");
    synthc->add_option("--truth-out", sy.truth_out);
    synthc->add_option("--frames-out", sy.frames_out, "PGM directory, or a .ppgf file");
    synthc->add_option("--frame-size", sy.frame_size, "WxH");
    synthc->add_option("--bit-depth", sy.bit_depth)->check(CLI::IsMember({8, 16}));
    synthc->add_option("--frame-margin", sy.frame_margin, "dark border width in pixels");
    synthc->add_option("--benchmark", sy.benchmark)->check(CLI::IsMember({"vitals", "heavy", "auth"}));
    synthc->add_option("--out-dir", sy.out_dir);

    ExportArgs xa;
    auto* exportc = app.add_subcommand("export-dl", "fixed-length dataset for the learning component");
    exportc->add_option("manifest", xa.manifest)->required();
    exportc->add_option("--out", xa.out, "output base path; writes .csv and .json")->required();
    exportc->add_option("--length", xa.length);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitCode::ok : ExitCode::usage;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (extract->parsed()) cmd_extract(ex, g, out);
        if (hrc->parsed()) cmd_hr(hr, g, out);
        if (enrollc->parsed()) cmd_enroll(en, g, out);
        if (verifyc->parsed()) cmd_verify(ve, g, out);
        if (evalc->parsed()) cmd_eval(ev, g, out);
        if (synthc->parsed()) cmd_synth(sy, g, out);
        if (exportc->parsed()) cmd_export_dl(xa, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::usage: return ExitCode::usage;
            case ErrorKind::data: return ExitCode::data;
            case ErrorKind::algorithm: return ExitCode::algorithm;
        }
    } catch (const std::exception& e) {
        // filesystem and JSON failures are input problems
        err << "error: " << e.what() << "\n";
        return ExitCode::data;
    }
    return ExitCode::ok;
}

}  // namespace ppgid::cli
