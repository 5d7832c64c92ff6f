#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ppgid/kernels.hpp"
#include "ppgid/signal.hpp"

namespace ppgid {

inline constexpr double kDefaultFrameRateHz = 14.0;

/// Ordered monochrome frames of identical size. Pixels are stored widened to
/// 16 bits regardless of the source depth.
class FrameSequence {
public:
    using Frame = kernels::Frame;

    FrameSequence(std::vector<Frame> frames, std::uint32_t width, std::uint32_t height,
                  double frame_rate_hz = kDefaultFrameRateHz, int bit_depth = 8);

    const std::vector<Frame>& frames() const noexcept { return frames_; }
    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t height() const noexcept { return height_; }
    double frame_rate_hz() const noexcept { return frame_rate_hz_; }
    int bit_depth() const noexcept { return bit_depth_; }
    std::size_t size() const noexcept { return frames_.size(); }

    std::uint16_t at(std::size_t frame, std::uint32_t x, std::uint32_t y) const {
        return frames_[frame][static_cast<std::size_t>(y) * width_ + x];
    }

    friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

private:
    std::vector<Frame> frames_;
    std::uint32_t width_;
    std::uint32_t height_;
    double frame_rate_hz_;
    int bit_depth_;
};

struct RoiSpec {
    std::uint32_t x0 = 0;
    std::uint32_t y0 = 0;
    std::uint32_t w = 0;
    std::uint32_t h = 0;

    static RoiSpec full(const FrameSequence& seq) { return {0, 0, seq.width(), seq.height()}; }
    friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

enum class FrameFormat { image_directory, raw_container };

/// Loads frames. For an image directory every `*.pgm` file is read in
/// lexicographic filename order (zero-pad frame numbers). The frame rate comes
/// from `frame_rate_hz` when given, else the directory's `metadata.json`
/// (`{"frame_rate_hz": ...}`), else 14 Hz. Raw containers carry their own rate
/// unless overridden.
FrameSequence load_frames(const std::filesystem::path& path, FrameFormat format,
                          std::optional<double> frame_rate_hz = std::nullopt);

/// Writes frames as zero-padded `frame_000000.pgm` files plus `metadata.json`.
void save_image_directory(const FrameSequence& seq, const std::filesystem::path& dir);
void save_raw_container(const FrameSequence& seq, const std::filesystem::path& file);

FrameSequence crop(const FrameSequence& seq, const RoiSpec& roi);

/// Bounding box of pixels above the Otsu threshold of the temporal mean frame.
/// Falls back to the full frame when the mean frame has less than one
/// intensity level of contrast or the selection covers under 1% of pixels.
RoiSpec auto_roi(const FrameSequence& seq);

enum class Reduction { sum, mean };

/// One sample per frame: total (or mean) pixel intensity.
PpgSignal extract_ppg(const FrameSequence& seq, Reduction reduction = Reduction::sum);

}  // namespace ppgid
