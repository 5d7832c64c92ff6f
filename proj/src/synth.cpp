#include "ppgid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ppgid/error.hpp"

namespace ppgid {

double SplitMix64::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

namespace {

void validate(const SynthSpec& s) {
    if (!(s.hr_bpm > 20.0 && s.hr_bpm < 240.0)) throw usage_error("hr_bpm must lie in (20, 240)");
    if (!(s.duration_s > 0.0)) throw usage_error("duration_s must be positive");
    if (!(s.sample_rate_hz > 0.0)) throw usage_error("sample_rate_hz must be positive");
    if (!(s.noise_sigma >= 0.0)) throw usage_error("noise_sigma must be non-negative");
    if (!(s.hr_jitter_frac >= 0.0 && s.hr_jitter_frac < 0.5)) throw usage_error("hr_jitter_frac must lie in [0, 0.5)");
    const auto& m = s.morphology;
    if (!(m.systolic_width_frac > 0.0)) throw usage_error("systolic_width_frac must be positive");
    if (!(m.dicrotic_amplitude_frac >= 0.0)) throw usage_error("dicrotic_amplitude_frac must be non-negative");
    if (!(m.dicrotic_delay_frac >= 0.0 && m.dicrotic_delay_frac < 1.0))
        throw usage_error("dicrotic_delay_frac must lie in [0, 1)");
    if (!(s.respiratory_depth >= 0.0 && s.respiratory_depth < 1.0))
        throw usage_error("respiratory_depth must lie in [0, 1)");
    if (!(s.alternans_depth >= 0.0 && s.respiratory_depth + s.alternans_depth < 1.0))
        throw usage_error("respiratory_depth + alternans_depth must lie in [0, 1)");
    if (!(s.respiratory_rate_hz > 0.0)) throw usage_error("respiratory_rate_hz must be positive");
}

}  // namespace

SynthResult synth_ppg(const SynthSpec& spec) {
    validate(spec);
    SplitMix64 rng(spec.seed);
    const double fs = spec.sample_rate_hz;
    const double period = 60.0 / spec.hr_bpm;
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * fs));
    if (n == 0) throw usage_error("duration shorter than one sample");
    const double end_t = static_cast<double>(n - 1) / fs;

    // Beat times, including one before the start and one past the end so the
    // pulse tails at the edges look like the interior.
    std::vector<double> beats;
    std::vector<double> periods;
    double t = spec.phase_frac * period - period;
    while (t <= end_t + period) {
        beats.push_back(t);
        const double p = period * std::max(0.5, 1.0 + spec.hr_jitter_frac * rng.normal());
        periods.push_back(p);
        t += p;
    }

    const auto& m = spec.morphology;
    const double resp_phase = 2.0 * std::numbers::pi * rng.uniform();
    std::vector<double> x(n, 0.0);
    for (std::size_t b = 0; b < beats.size(); ++b) {
        const double resp =
            spec.respiratory_depth * std::sin(2.0 * std::numbers::pi * spec.respiratory_rate_hz * beats[b] + resp_phase);
        const double alt = (b % 2 == 0) ? spec.alternans_depth : -spec.alternans_depth;
        const double sigma = m.systolic_width_frac * periods[b] * (1.0 + resp + alt);
        const double dicrotic_amp = m.dicrotic_amplitude_frac;
        const double dicrotic_t = beats[b] + m.dicrotic_delay_frac * periods[b];
        for (std::size_t i = 0; i < n; ++i) {
            const double ti = static_cast<double>(i) / fs;
            const double u = (ti - beats[b]) / sigma;
            const double v = (ti - dicrotic_t) / sigma;
            x[i] += std::exp(-0.5 * u * u) + dicrotic_amp * std::exp(-0.5 * v * v);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) / fs;
        double d = 0.0;
        for (std::size_t k = spec.drift.size(); k-- > 0;) d = d * ti + spec.drift[k];
        x[i] += d;
    }
    if (spec.noise_sigma > 0.0)
        for (double& v : x) v += spec.noise_sigma * rng.normal();

    SynthGroundTruth truth;
    std::vector<double> inside;
    for (double bt : beats) {
        const double idx = std::round(bt * fs);
        if (idx < 0.0 || idx > static_cast<double>(n - 1)) continue;
        const auto i = static_cast<std::size_t>(idx);
        if (!truth.beat_peak_indices.empty() && truth.beat_peak_indices.indices.back() == i) continue;
        truth.beat_peak_indices.indices.push_back(i);
        inside.push_back(bt);
    }
    truth.true_hr_bpm = inside.size() >= 2
                            ? 60.0 * static_cast<double>(inside.size() - 1) / (inside.back() - inside.front())
                            : spec.hr_bpm;
    return {PpgSignal(std::move(x), fs), std::move(truth)};
}

FrameSequence synth_frames(const PpgSignal& sig, std::uint32_t width, std::uint32_t height, int bit_depth,
                           std::uint32_t margin) {
    if (width == 0 || height == 0) throw usage_error("frame dimensions must be positive");
    if (bit_depth != 8 && bit_depth != 16) throw usage_error("bit depth must be 8 or 16");
    if (2ull * margin >= width || 2ull * margin >= height) throw usage_error("margin leaves no fingertip block");

    const std::uint32_t bw = width - 2 * margin, bh = height - 2 * margin;
    const std::uint64_t block = static_cast<std::uint64_t>(bw) * bh;
    const std::uint64_t maxval = bit_depth == 8 ? 255 : 65535;
    const auto [mn, mx] = std::minmax_element(sig.samples().begin(), sig.samples().end());
    const double lo = *mn, range = *mx - *mn;

    std::vector<kernels::Frame> frames;
    frames.reserve(sig.size());
    for (double s : sig.samples()) {
        const double u = range > 0.0 ? (s - lo) / range : 0.5;
        const auto total = static_cast<std::uint64_t>(std::llround(u * static_cast<double>(maxval * block)));
        const std::uint64_t base = total / block, extra = total % block;
        kernels::Frame f(static_cast<std::size_t>(width) * height, 0);
        std::uint64_t k = 0;
        for (std::uint32_t y = margin; y < margin + bh; ++y)
            for (std::uint32_t xpix = margin; xpix < margin + bw; ++xpix, ++k)
                f[static_cast<std::size_t>(y) * width + xpix] = static_cast<std::uint16_t>(base + (k < extra ? 1 : 0));
        frames.push_back(std::move(f));
    }
    return {std::move(frames), width, height, sig.sample_rate_hz(), bit_depth};
}

const std::array<NamedMorphology, 5>& morphology_presets() {
    static const std::array<NamedMorphology, 5> presets{{
        {"sharp", {0.07, 0.15, 0.30}},
        {"dicrotic", {0.11, 0.50, 0.33}},
        {"broad", {0.17, 0.20, 0.40}},
        {"late-notch", {0.12, 0.30, 0.40}},
        {"rounded", {0.22, 0.08, 0.30}},
    }};
    return presets;
}

const Morphology& morphology_preset(std::string_view name) {
    for (const auto& p : morphology_presets())
        if (p.name == name) return p.morphology;
    throw usage_error("unknown morphology preset '" + std::string(name) + "'");
}

const std::array<UserProfile, 5>& user_profiles() {
    // Resting periods are k/8 samples at 14 Hz so every trial sees the same
    // set of beat sampling phases.
    static const std::array<UserProfile, 5> profiles{{
        {"user1", {0.22, 0.08, 0.30}, 0.00, 840.0 / 12.125},
        {"user2", {0.17, 0.20, 0.40}, 0.40, 840.0 / 11.875},
        {"user3", {0.15, 0.15, 0.35}, 0.55, 840.0 / 12.375},
        {"user4", {0.15, 0.40, 0.33}, 0.68, 840.0 / 11.625},
        {"user5", {0.17, 0.25, 0.42}, 0.78, 840.0 / 12.625},
    }};
    return profiles;
}

namespace {

std::vector<double> random_drift(SplitMix64& rng) {
    return {10.0 * rng.uniform(), 0.06 * (rng.uniform() - 0.5), 0.004 * (rng.uniform() - 0.5)};
}

std::vector<BenchmarkTrial> hr_grid(std::uint64_t seed, bool heavy) {
    SplitMix64 rng(seed);
    std::vector<BenchmarkTrial> out;
    const auto& presets = morphology_presets();
    for (std::size_t u = 0; u < presets.size(); ++u) {
        for (int draw = 1; draw <= 6; ++draw) {
            BenchmarkTrial t;
            t.user_label = std::string(presets[u].name);
            t.trial_index = draw;
            t.spec.hr_bpm = 55.0 + 55.0 * rng.uniform();
            t.spec.duration_s = 15.0;
            t.spec.morphology = presets[u].morphology;
            t.spec.drift = random_drift(rng);
            t.spec.phase_frac = rng.uniform();
            t.spec.seed = rng.next();
            if (heavy) {
                t.spec.noise_sigma = 0.5 + 0.5 * rng.uniform();
                t.spec.hr_jitter_frac = 0.05;
            } else if (draw > 2) {
                t.spec.noise_sigma = 0.03 + 0.07 * rng.uniform();
                t.spec.hr_jitter_frac = 0.02;
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace

std::vector<BenchmarkTrial> vitals_benchmark(std::uint64_t seed) { return hr_grid(seed, false); }

std::vector<BenchmarkTrial> heavy_noise_benchmark(std::uint64_t seed) { return hr_grid(seed, true); }

std::vector<BenchmarkTrial> auth_benchmark(std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<BenchmarkTrial> out;
    for (const auto& user : user_profiles()) {
        for (int trial = 1; trial <= 6; ++trial) {
            BenchmarkTrial t;
            t.user_label = std::string(user.name);
            t.trial_index = trial;
            t.spec.hr_bpm = user.resting_hr_bpm;
            t.spec.duration_s = 15.0;
            t.spec.morphology = user.morphology;
            t.spec.alternans_depth = user.alternans_depth;
            t.spec.drift = random_drift(rng);
            t.spec.phase_frac = rng.uniform();
            t.spec.noise_sigma = 0.01;
            t.spec.hr_jitter_frac = 0.0;
            t.spec.seed = rng.next();
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace ppgid
