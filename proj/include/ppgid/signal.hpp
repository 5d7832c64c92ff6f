#pragma once

#include <cstddef>
#include <vector>

namespace ppgid {

/// Uniformly sampled real-valued series. Construction validates the invariants
/// (non-empty, finite samples, positive rate).
class PpgSignal {
public:
    PpgSignal(std::vector<double> samples, double sample_rate_hz);

    const std::vector<double>& samples() const noexcept { return samples_; }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double duration_s() const noexcept { return static_cast<double>(samples_.size()) / sample_rate_hz_; }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Same rate, new samples.
    PpgSignal with_samples(std::vector<double> samples) const { return {std::move(samples), sample_rate_hz_}; }

    /// True when the sample range is at rounding level relative to the
    /// largest magnitude. Such a signal carries no beats.
    bool is_flat(double rel_tol = 1e-12) const;

    friend bool operator==(const PpgSignal&, const PpgSignal&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
};

/// Strictly increasing sample indices of detected peaks.
struct PeakList {
    std::vector<std::size_t> indices;

    std::size_t size() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
    friend bool operator==(const PeakList&, const PeakList&) = default;
};

}  // namespace ppgid
