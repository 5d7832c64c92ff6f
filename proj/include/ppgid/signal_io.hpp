#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ppgid/signal.hpp"

namespace ppgid {

/// Shortest decimal text that round-trips the double exactly.
std::string format_real(double v);

/// CSV body with header `sample_index,intensity`.
std::string signal_to_csv(const PpgSignal& sig);
/// Single JSON object `{"sample_rate_hz": ..., "samples": [...]}`.
std::string signal_to_json(const PpgSignal& sig);

PpgSignal signal_from_csv(const std::string& text, double sample_rate_hz);
PpgSignal signal_from_json(const std::string& text);

/// Sidecar metadata for a CSV signal: same path with the extension replaced by `.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// `.json` files are read as the single-object form; anything else as CSV
/// plus sidecar. Without a sidecar the rate falls back to `fallback_rate_hz`.
PpgSignal read_signal(const std::filesystem::path& path, std::optional<double> fallback_rate_hz = std::nullopt);

/// Writes by extension: `.json` as one object, otherwise CSV plus sidecar.
void write_signal(const PpgSignal& sig, const std::filesystem::path& path);

}  // namespace ppgid
