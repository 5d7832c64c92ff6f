#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ppgid/frame_ingest.hpp"
#include "ppgid/signal.hpp"

namespace ppgid {

/// SplitMix64. Fixed so that seeded outputs are identical on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal by Box-Muller; the second variate of each pair is cached.
    double normal();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Pulse shape: a Gaussian systolic peak plus a delayed, scaled Gaussian
/// dicrotic wave of the same width. Fractions are of the beat period.
struct Morphology {
    double systolic_width_frac = 0.12;
    double dicrotic_amplitude_frac = 0.35;
    double dicrotic_delay_frac = 0.35;
};

struct SynthSpec {
    double hr_bpm = 75.0;
    double duration_s = 15.0;
    double sample_rate_hz = 14.0;
    Morphology morphology{};
    std::vector<double> drift;  // polynomial coefficients in t (seconds), constant term first
    double noise_sigma = 0.0;   // relative to the unit systolic amplitude
    double hr_jitter_frac = 0.0;
    double phase_frac = 0.5;  // first beat time as a fraction of the period
    /// Beat-to-beat systolic width modulation: width scales by
    /// 1 + respiratory_depth * sin(2 pi respiratory_rate_hz t + random phase).
    double respiratory_depth = 0.0;
    double respiratory_rate_hz = 0.25;
    /// Alternating beats are widened and narrowed by this fraction.
    double alternans_depth = 0.0;
    std::uint64_t seed = 1;
};

struct SynthGroundTruth {
    double true_hr_bpm = 0.0;
    PeakList beat_peak_indices;
};

struct SynthResult {
    PpgSignal signal;
    SynthGroundTruth truth;
};

SynthResult synth_ppg(const SynthSpec& spec);

/// Renders each sample as one frame. Samples map affinely onto
/// [0, maxval * pixels] of total block intensity, spread over the block so that
/// pixel values differ by at most one level; a constant signal maps to
/// mid-scale. `margin` pixels of zero-valued background surround the block.
FrameSequence synth_frames(const PpgSignal& sig, std::uint32_t width, std::uint32_t height, int bit_depth,
                           std::uint32_t margin = 0);

struct NamedMorphology {
    std::string_view name;
    Morphology morphology;
};

/// Five fixed pulse shapes.
const std::array<NamedMorphology, 5>& morphology_presets();
const Morphology& morphology_preset(std::string_view name);

/// Synthetic identity: pulse shape, beat alternation depth and resting
/// heart rate. Trials of one user differ only in their random draws.
struct UserProfile {
    std::string_view name;
    Morphology morphology;
    double alternans_depth = 0.0;
    double resting_hr_bpm = 70.0;
};

const std::array<UserProfile, 5>& user_profiles();

struct BenchmarkTrial {
    std::string user_label;
    int trial_index = 1;
    SynthSpec spec;
};

/// 5 morphologies x 6 draws, 15 s at 14 Hz, HR 55-110 bpm. Draws 1-2 are
/// noise-free (drift only); draws 3-6 add mild noise, jitter and drift.
std::vector<BenchmarkTrial> vitals_benchmark(std::uint64_t seed = 2024);

/// Same layout with noise above 0.5 for exercising the quality gate.
std::vector<BenchmarkTrial> heavy_noise_benchmark(std::uint64_t seed = 4048);

/// 5 users x 6 trials built from user_profiles(); trials redraw noise,
/// jitter, drift and beat phase.
std::vector<BenchmarkTrial> auth_benchmark(std::uint64_t seed = 7);

}  // namespace ppgid
