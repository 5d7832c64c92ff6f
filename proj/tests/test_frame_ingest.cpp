#include "doctest.h"
#include "ppgid/error.hpp"
#include "ppgid/frame_ingest.hpp"
#include "ppgid/synth.hpp"
#include "support.hpp"

using namespace ppgid;
namespace fs = std::filesystem;

namespace {

void write_pgm(const fs::path& p, std::uint32_t w, std::uint32_t h, const std::vector<std::uint16_t>& px,
               int maxval = 255) {
    std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
    for (auto v : px) {
        if (maxval > 255) s.push_back(static_cast<char>(v >> 8));
        s.push_back(static_cast<char>(v & 0xff));
    }
    testutil::spit(p, s);
}

FrameSequence random_sequence(SplitMix64& rng, std::size_t count, std::uint32_t w, std::uint32_t h) {
    std::vector<FrameSequence::Frame> frames(count, FrameSequence::Frame(static_cast<std::size_t>(w) * h));
    for (auto& f : frames)
        for (auto& p : f) p = static_cast<std::uint16_t>(rng.next() % 256);
    return FrameSequence(frames, w, h);
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::usage;
}

}  // namespace

TEST_CASE("image directory loads in filename order") {
    testutil::TempDir dir;
    for (int i = 0; i < 3; ++i)
        write_pgm(dir / ("f" + std::to_string(2 - i) + ".pgm"), 4, 4, std::vector<std::uint16_t>(16, 10 * i));
    const auto seq = load_frames(dir.path(), FrameFormat::image_directory);
    CHECK(seq.size() == 3);
    CHECK(seq.width() == 4);
    CHECK(seq.height() == 4);
    CHECK(seq.frame_rate_hz() == 14.0);
    // f0 was written last with value 20
    CHECK(seq.at(0, 0, 0) == 20);
    CHECK(seq.at(2, 3, 3) == 0);
}

TEST_CASE("16-bit PGM is read big-endian") {
    testutil::TempDir dir;
    write_pgm(dir / "a.pgm", 2, 1, {0x1234, 65535}, 65535);
    const auto seq = load_frames(dir.path(), FrameFormat::image_directory, 30.0);
    CHECK(seq.bit_depth() == 16);
    CHECK(seq.at(0, 0, 0) == 0x1234);
    CHECK(seq.at(0, 1, 0) == 65535);
    CHECK(seq.frame_rate_hz() == 30.0);
}

TEST_CASE("loading errors") {
    testutil::TempDir dir;
    CHECK(kind_of([&] { load_frames(dir / "nope", FrameFormat::image_directory); }) == ErrorKind::data);
    CHECK(kind_of([&] { load_frames(dir.path(), FrameFormat::image_directory); }) == ErrorKind::data);
    try {
        load_frames(dir.path(), FrameFormat::image_directory);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("zero frames") != std::string::npos);
    }
    write_pgm(dir / "a.pgm", 4, 4, std::vector<std::uint16_t>(16, 1));
    write_pgm(dir / "b.pgm", 5, 5, std::vector<std::uint16_t>(25, 1));
    try {
        load_frames(dir.path(), FrameFormat::image_directory);
        FAIL("expected mixed dimensions");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("mixed dimensions") != std::string::npos);
    }
    fs::remove(dir / "b.pgm");
    testutil::spit(dir / "c.pgm", "P5\n4 4\n1023\n");
    CHECK(kind_of([&] { load_frames(dir.path(), FrameFormat::image_directory); }) == ErrorKind::data);
    CHECK(kind_of([] { FrameSequence({}, 4, 4); }) == ErrorKind::data);
    CHECK(kind_of([] { FrameSequence({{1, 2}}, 2, 1, 14.0, 12); }) == ErrorKind::data);
}

TEST_CASE("image directory and raw container round trip") {
    SplitMix64 rng(3);
    const auto seq8 = random_sequence(rng, 5, 3, 2);
    testutil::TempDir dir;
    save_image_directory(seq8, dir / "img");
    save_raw_container(seq8, dir / "seq.ppgf");
    CHECK(load_frames(dir / "img", FrameFormat::image_directory) == seq8);
    CHECK(load_frames(dir / "seq.ppgf", FrameFormat::raw_container) == seq8);

    std::vector<FrameSequence::Frame> frames{{0, 1000, 65535}, {7, 8, 9}};
    const FrameSequence seq16(frames, 3, 1, 9.5, 16);
    save_image_directory(seq16, dir / "img16");
    save_raw_container(seq16, dir / "seq16.ppgf");
    CHECK(load_frames(dir / "img16", FrameFormat::image_directory) == seq16);
    CHECK(load_frames(dir / "seq16.ppgf", FrameFormat::raw_container) == seq16);
}

TEST_CASE("raw container header layout") {
    const FrameSequence seq({{1, 2}, {3, 4}}, 2, 1, 14.0, 8);
    testutil::TempDir dir;
    save_raw_container(seq, dir / "x.ppgf");
    const auto bytes = testutil::slurp(dir / "x.ppgf");
    REQUIRE(bytes.size() == 25 + 4);
    CHECK(bytes.substr(0, 4) == "PPGF");
    CHECK(static_cast<unsigned char>(bytes[4]) == 2);   // width, little-endian
    CHECK(static_cast<unsigned char>(bytes[12]) == 2);  // frame count
    CHECK(static_cast<unsigned char>(bytes[24]) == 8);  // bit depth
    CHECK(static_cast<unsigned char>(bytes[25]) == 1);
    CHECK(static_cast<unsigned char>(bytes[28]) == 4);
}

TEST_CASE("crop") {
    SplitMix64 rng(4);
    const auto seq = random_sequence(rng, 3, 4, 4);
    CHECK(crop(seq, {0, 0, 4, 4}) == seq);
    const auto c = crop(seq, {1, 1, 2, 2});
    CHECK(c.size() == 3);
    CHECK(c.width() == 2);
    CHECK(c.height() == 2);
    CHECK(c.at(1, 1, 0) == seq.at(1, 2, 1));
    CHECK(c.frame_rate_hz() == seq.frame_rate_hz());
    CHECK(kind_of([&] { crop(seq, {3, 3, 2, 2}); }) == ErrorKind::usage);
    CHECK(kind_of([&] { crop(seq, {0, 0, 0, 1}); }) == ErrorKind::usage);
}

TEST_CASE("extract_ppg sums pixel intensities") {
    const FrameSequence ones(std::vector<FrameSequence::Frame>(3, FrameSequence::Frame(4, 1)), 2, 2);
    CHECK(extract_ppg(ones).samples() == std::vector<double>{4, 4, 4});
    CHECK(extract_ppg(ones, Reduction::mean).samples() == std::vector<double>{1, 1, 1});

    const FrameSequence seq({{10, 0}, {6, 6}, {4, 5}}, 2, 1, 20.0);
    const auto s = extract_ppg(seq);
    CHECK(s.samples() == std::vector<double>{10, 12, 9});
    CHECK(s.sample_rate_hz() == 20.0);
}

TEST_CASE("extract_ppg properties on random sequences") {
    SplitMix64 rng(8);
    for (int round = 0; round < 10; ++round) {
        const auto w = static_cast<std::uint32_t>(1 + rng.next() % 8);
        const auto h = static_cast<std::uint32_t>(1 + rng.next() % 8);
        const auto seq = random_sequence(rng, 1 + rng.next() % 10, w, h);
        const auto full = extract_ppg(seq);
        CHECK(full.size() == seq.size());
        CHECK(extract_ppg(crop(seq, RoiSpec::full(seq))) == full);

        const auto x0 = static_cast<std::uint32_t>(rng.next() % w);
        const auto y0 = static_cast<std::uint32_t>(rng.next() % h);
        const RoiSpec roi{x0, y0, static_cast<std::uint32_t>(1 + rng.next() % (w - x0)),
                          static_cast<std::uint32_t>(1 + rng.next() % (h - y0))};
        const auto part = extract_ppg(crop(seq, roi));
        for (std::size_t i = 0; i < part.size(); ++i) CHECK(part[i] <= full[i]);

        const auto r = auto_roi(seq);
        CHECK(r.w >= 1);
        CHECK(r.h >= 1);
        CHECK(r.x0 + r.w <= w);
        CHECK(r.y0 + r.h <= h);
    }
}

TEST_CASE("auto_roi finds a bright block") {
    SplitMix64 rng(9);
    for (int round = 0; round < 10; ++round) {
        const std::uint32_t w = 12, h = 10;
        const auto bx = static_cast<std::uint32_t>(rng.next() % 8), by = static_cast<std::uint32_t>(rng.next() % 6);
        const auto bw = static_cast<std::uint32_t>(2 + rng.next() % (w - bx - 1));
        const auto bh = static_cast<std::uint32_t>(2 + rng.next() % (h - by - 1));
        std::vector<FrameSequence::Frame> frames;
        for (int f = 0; f < 6; ++f) {
            FrameSequence::Frame fr(w * h);
            for (std::uint32_t y = 0; y < h; ++y)
                for (std::uint32_t x = 0; x < w; ++x) {
                    const bool in = x >= bx && x < bx + bw && y >= by && y < by + bh;
                    fr[y * w + x] = static_cast<std::uint16_t>(in ? 180 + rng.next() % 40 : rng.next() % 20);
                }
            frames.push_back(fr);
        }
        const FrameSequence seq(frames, w, h);
        const auto box = oracle::bright_box(frames, w, h);
        REQUIRE(box);
        const auto r = auto_roi(seq);
        CHECK(r.x0 == box->x0);
        CHECK(r.y0 == box->y0);
        CHECK(r.w == box->w);
        CHECK(r.h == box->h);
        CHECK(r == RoiSpec{bx, by, bw, bh});
    }
}

TEST_CASE("auto_roi single bright pixel and constant fallback") {
    std::vector<FrameSequence::Frame> frames(3, FrameSequence::Frame(25, 0));
    for (auto& f : frames) f[3 * 5 + 2] = 200;
    const FrameSequence seq(frames, 5, 5);
    const auto box = oracle::bright_box(frames, 5, 5);
    const auto r = auto_roi(seq);
    CHECK(r == RoiSpec{box->x0, box->y0, box->w, box->h});
    CHECK(r == RoiSpec{2, 3, 1, 1});

    const FrameSequence flat(std::vector<FrameSequence::Frame>(3, FrameSequence::Frame(25, 77)), 5, 5);
    CHECK(auto_roi(flat) == RoiSpec::full(flat));
}

TEST_CASE("auto_roi falls back when the selection is tiny") {
    // one bright pixel out of 200 x 1 is 0.5%
    std::vector<FrameSequence::Frame> frames(2, FrameSequence::Frame(200, 0));
    for (auto& f : frames) f[50] = 255;
    const FrameSequence seq(frames, 200, 1);
    CHECK(auto_roi(seq) == RoiSpec::full(seq));
}
