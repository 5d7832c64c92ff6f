#include "ppgid/frame_ingest.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "json.hpp"

#include "ppgid/error.hpp"

namespace ppgid {
namespace fs = std::filesystem;

FrameSequence::FrameSequence(std::vector<Frame> frames, std::uint32_t width, std::uint32_t height,
                             double frame_rate_hz, int bit_depth)
    : frames_(std::move(frames)), width_(width), height_(height), frame_rate_hz_(frame_rate_hz), bit_depth_(bit_depth) {
    if (frames_.empty()) throw data_error("zero frames");
    if (width_ == 0 || height_ == 0) throw data_error("frame dimensions must be positive");
    if (!(frame_rate_hz_ > 0.0)) throw data_error("frame rate must be positive");
    if (bit_depth_ != 8 && bit_depth_ != 16) throw data_error("unsupported bit depth " + std::to_string(bit_depth_));
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    const std::uint32_t maxval = bit_depth_ == 8 ? 255u : 65535u;
    for (const auto& f : frames_) {
        if (f.size() != n) throw data_error("mixed dimensions");
        if (bit_depth_ == 8 && std::any_of(f.begin(), f.end(), [&](std::uint16_t v) { return v > maxval; }))
            throw data_error("pixel value exceeds 8-bit range");
    }
}

namespace {

std::vector<unsigned char> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw data_error("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct PgmImage {
    std::uint32_t width;
    std::uint32_t height;
    int bit_depth;
    kernels::Frame pixels;
};

PgmImage parse_pgm(const std::vector<unsigned char>& buf, const std::string& name) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < buf.size()) {
            if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else if (std::isspace(buf[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_uint = [&]() -> std::uint32_t {
        skip_space();
        if (pos >= buf.size() || !std::isdigit(buf[pos])) throw data_error(name + ": malformed PGM header");
        std::uint64_t v = 0;
        while (pos < buf.size() && std::isdigit(buf[pos])) {
            v = v * 10 + (buf[pos++] - '0');
            if (v > 0xFFFFFFFFu) throw data_error(name + ": PGM header value out of range");
        }
        return static_cast<std::uint32_t>(v);
    };

    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') throw data_error(name + ": not a binary PGM (P5) file");
    pos = 2;
    PgmImage img{};
    img.width = read_uint();
    img.height = read_uint();
    const std::uint32_t maxval = read_uint();
    if (maxval == 255) {
        img.bit_depth = 8;
    } else if (maxval == 65535) {
        img.bit_depth = 16;
    } else {
        throw data_error(name + ": unsupported bit depth (maxval " + std::to_string(maxval) + ")");
    }
    if (pos >= buf.size() || !std::isspace(buf[pos])) throw data_error(name + ": malformed PGM header");
    ++pos;

    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    const std::size_t bytes = count * (img.bit_depth == 8 ? 1 : 2);
    if (buf.size() - pos < bytes) throw data_error(name + ": truncated pixel data");
    img.pixels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        img.pixels[i] = img.bit_depth == 8
                            ? buf[pos + i]
                            : static_cast<std::uint16_t>((buf[pos + 2 * i] << 8) | buf[pos + 2 * i + 1]);  // big-endian
    }
    return img;
}

FrameSequence load_image_directory(const fs::path& dir, std::optional<double> rate) {
    if (!fs::is_directory(dir)) throw data_error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    if (files.empty()) throw data_error("zero frames in " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    double frame_rate = kDefaultFrameRateHz;
    if (rate) {
        frame_rate = *rate;
    } else if (const auto meta = dir / "metadata.json"; fs::exists(meta)) {
        try {
            std::ifstream in(meta);
            const auto j = nlohmann::json::parse(in);
            frame_rate = j.at("frame_rate_hz").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw data_error("invalid metadata.json: " + std::string(e.what()));
        }
    }

    std::vector<kernels::Frame> frames;
    frames.reserve(files.size());
    std::uint32_t width = 0, height = 0;
    int depth = 0;
    for (const auto& f : files) {
        auto img = parse_pgm(read_file(f), f.filename().string());
        if (frames.empty()) {
            width = img.width;
            height = img.height;
            depth = img.bit_depth;
        } else if (img.width != width || img.height != height) {
            throw data_error("mixed dimensions: " + f.filename().string());
        } else if (img.bit_depth != depth) {
            throw data_error("mixed bit depths: " + f.filename().string());
        }
        frames.push_back(std::move(img.pixels));
    }
    return {std::move(frames), width, height, frame_rate, depth};
}

template <typename T>
T read_le(const unsigned char* p) {
    T v{};
    unsigned char tmp[sizeof(T)];
    std::memcpy(tmp, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(tmp, tmp + sizeof(T));
    std::memcpy(&v, tmp, sizeof(T));
    return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
    unsigned char tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(tmp, tmp + sizeof(T));
    out.write(reinterpret_cast<const char*>(tmp), sizeof(T));
}

constexpr std::size_t kRawHeaderSize = 4 + 4 + 4 + 4 + 8 + 1;

FrameSequence load_raw_container(const fs::path& file, std::optional<double> rate) {
    if (!fs::is_regular_file(file)) throw data_error("missing raw container: " + file.string());
    const auto buf = read_file(file);
    if (buf.size() < kRawHeaderSize || std::memcmp(buf.data(), "PPGF", 4) != 0)
        throw data_error("not a PPGF container: " + file.string());
    const auto width = read_le<std::uint32_t>(buf.data() + 4);
    const auto height = read_le<std::uint32_t>(buf.data() + 8);
    const auto count = read_le<std::uint32_t>(buf.data() + 12);
    const auto stored_rate = read_le<double>(buf.data() + 16);
    const int depth = buf[24];
    if (depth != 8 && depth != 16) throw data_error("unsupported bit depth " + std::to_string(depth));
    if (count == 0) throw data_error("zero frames");

    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    const std::size_t bpp = depth == 8 ? 1 : 2;
    if (buf.size() - kRawHeaderSize < pixels * bpp * count) throw data_error("truncated PPGF container");

    std::vector<kernels::Frame> frames(count, kernels::Frame(pixels));
    const unsigned char* p = buf.data() + kRawHeaderSize;
    for (auto& f : frames) {
        for (std::size_t i = 0; i < pixels; ++i, p += bpp) f[i] = depth == 8 ? *p : read_le<std::uint16_t>(p);
    }
    return {std::move(frames), width, height, rate.value_or(stored_rate), depth};
}

}  // namespace

FrameSequence load_frames(const fs::path& path, FrameFormat format, std::optional<double> frame_rate_hz) {
    if (!fs::exists(path)) throw data_error("missing path: " + path.string());
    return format == FrameFormat::image_directory ? load_image_directory(path, frame_rate_hz)
                                                  : load_raw_container(path, frame_rate_hz);
}

void save_image_directory(const FrameSequence& seq, const fs::path& dir) {
    fs::create_directories(dir);
    const bool wide = seq.bit_depth() == 16;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06zu.pgm", i);
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw data_error("cannot write " + (dir / name).string());
        out << "P5\n" << seq.width() << ' ' << seq.height() << '\n' << (wide ? 65535 : 255) << '\n';
        for (std::uint16_t v : seq.frames()[i]) {
            if (wide) out.put(static_cast<char>(v >> 8));
            out.put(static_cast<char>(v & 0xFF));
        }
    }
    std::ofstream meta(dir / "metadata.json");
    meta << nlohmann::json{{"frame_rate_hz", seq.frame_rate_hz()}}.dump() << '\n';
}

void save_raw_container(const FrameSequence& seq, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw data_error("cannot write " + file.string());
    out.write("PPGF", 4);
    write_le<std::uint32_t>(out, seq.width());
    write_le<std::uint32_t>(out, seq.height());
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(seq.size()));
    write_le<double>(out, seq.frame_rate_hz());
    out.put(static_cast<char>(seq.bit_depth()));
    for (const auto& f : seq.frames()) {
        for (std::uint16_t v : f) {
            if (seq.bit_depth() == 8)
                out.put(static_cast<char>(v));
            else
                write_le<std::uint16_t>(out, v);
        }
    }
}

FrameSequence crop(const FrameSequence& seq, const RoiSpec& roi) {
    if (roi.w == 0 || roi.h == 0) throw usage_error("roi must have positive extent");
    if (static_cast<std::uint64_t>(roi.x0) + roi.w > seq.width() ||
        static_cast<std::uint64_t>(roi.y0) + roi.h > seq.height())
        throw usage_error("roi out of bounds");
    std::vector<kernels::Frame> out;
    out.reserve(seq.size());
    for (const auto& f : seq.frames()) {
        kernels::Frame c;
        c.reserve(static_cast<std::size_t>(roi.w) * roi.h);
        for (std::uint32_t y = roi.y0; y < roi.y0 + roi.h; ++y) {
            const auto row = f.begin() + static_cast<std::ptrdiff_t>(y) * seq.width();
            c.insert(c.end(), row + roi.x0, row + roi.x0 + roi.w);
        }
        out.push_back(std::move(c));
    }
    return {std::move(out), roi.w, roi.h, seq.frame_rate_hz(), seq.bit_depth()};
}

RoiSpec auto_roi(const FrameSequence& seq) {
    const std::size_t n = static_cast<std::size_t>(seq.width()) * seq.height();
    std::vector<double> mean(n, 0.0);
    for (const auto& f : seq.frames())
        for (std::size_t i = 0; i < n; ++i) mean[i] += f[i];
    for (double& v : mean) v /= static_cast<double>(seq.size());

    const auto [mn_it, mx_it] = std::minmax_element(mean.begin(), mean.end());
    const double lo = *mn_it, range = *mx_it - *mn_it;
    if (range < 1.0) return RoiSpec::full(seq);

    constexpr int kBins = 256;
    std::array<double, kBins> hist{};
    std::vector<int> bin_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        bin_of[i] = std::min(kBins - 1, static_cast<int>((mean[i] - lo) / range * kBins));
        hist[bin_of[i]] += 1.0;
    }
    double total_mass = 0.0;
    for (int b = 0; b < kBins; ++b) total_mass += b * hist[b];

    // Otsu: maximise between-class variance over the split "bin <= t".
    int best_t = 0;
    double best_var = -1.0, w0 = 0.0, mass0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += hist[t];
        mass0 += t * hist[t];
        const double w1 = static_cast<double>(n) - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double d = mass0 / w0 - (total_mass - mass0) / w1;
        const double var = w0 * w1 * d * d;
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }

    std::uint32_t x_min = seq.width(), y_min = seq.height(), x_max = 0, y_max = 0;
    std::size_t selected = 0;
    for (std::uint32_t y = 0; y < seq.height(); ++y) {
        for (std::uint32_t x = 0; x < seq.width(); ++x) {
            if (bin_of[static_cast<std::size_t>(y) * seq.width() + x] <= best_t) continue;
            ++selected;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (selected == 0 || static_cast<double>(selected) < 0.01 * static_cast<double>(n)) return RoiSpec::full(seq);
    return {x_min, y_min, x_max - x_min + 1, y_max - y_min + 1};
}

PpgSignal extract_ppg(const FrameSequence& seq, Reduction reduction) {
    auto sums = kernels::frame_sums(seq.frames());
    if (reduction == Reduction::mean) {
        const double n = static_cast<double>(seq.width()) * seq.height();
        for (double& v : sums) v /= n;
    }
    return {std::move(sums), seq.frame_rate_hz()};
}

}  // namespace ppgid
