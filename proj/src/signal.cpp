#include "ppgid/signal.hpp"

#include <algorithm>
#include <cmath>

#include "ppgid/error.hpp"

namespace ppgid {

PpgSignal::PpgSignal(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (samples_.empty()) throw data_error("signal has no samples");
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
        throw data_error("sample rate must be positive");
    for (double v : samples_)
        if (!std::isfinite(v)) throw data_error("signal contains non-finite samples");
}

bool PpgSignal::is_flat(double rel_tol) const {
    const auto [lo, hi] = std::minmax_element(samples_.begin(), samples_.end());
    return *hi - *lo <= rel_tol * std::max(std::abs(*lo), std::abs(*hi));
}

}  // namespace ppgid
