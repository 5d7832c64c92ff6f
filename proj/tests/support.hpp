#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numeric code.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline std::vector<double> zscore(const std::vector<double>& x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(x.size()));
    std::vector<double> out;
    for (double v : x) out.push_back((v - m) / sd);
    return out;
}

// Direct double loop over lags; row r, column k is lag k-(L-1).
inline std::vector<std::vector<double>> correlate(const std::vector<std::vector<double>>& waves,
                                                  const std::vector<double>& mean_wave) {
    const auto ref = zscore(mean_wave);
    const long L = static_cast<long>(ref.size());
    std::vector<std::vector<double>> out;
    for (const auto& w : waves) {
        const auto z = zscore(w);
        std::vector<double> row;
        for (long lag = -(L - 1); lag <= L - 1; ++lag) {
            double s = 0.0;
            for (long n = 0; n < L; ++n) {
                const long m = n + lag;
                if (m >= 0 && m < L) s += z[m] * ref[n];
            }
            row.push_back(s / static_cast<double>(L));
        }
        out.push_back(row);
    }
    return out;
}

inline std::vector<double> column_min(const std::vector<std::vector<double>>& rows) {
    std::vector<double> out = rows.front();
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c)
            if (r[c] < out[c]) out[c] = r[c];
    return out;
}

// Adjusted Fisher-Pearson G1 from raw central moments.
inline double skewness(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double m = mean(x);
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        m2 += std::pow(v - m, 2);
        m3 += std::pow(v - m, 3);
    }
    m2 /= n;
    m3 /= n;
    return m3 / std::pow(m2, 1.5) * std::sqrt(n * (n - 1.0)) / (n - 2.0);
}

// Amplitude of the best-fitting a*sin + b*cos + c at frequency f over
// samples [from, to).
inline double sinusoid_amplitude(const std::vector<double>& x, double f, double fs, std::size_t from,
                                 std::size_t to) {
    const auto n = static_cast<Eigen::Index>(to - from);
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = static_cast<double>(from + static_cast<std::size_t>(i)) / fs;
        A(i, 0) = std::sin(2.0 * M_PI * f * t);
        A(i, 1) = std::cos(2.0 * M_PI * f * t);
        A(i, 2) = 1.0;
        y(i) = x[from + static_cast<std::size_t>(i)];
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
    return std::hypot(c(0), c(1));
}

// Chebyshev polynomial of the first kind.
inline double cheb_t(int n, double x) {
    if (std::abs(x) <= 1.0) return std::cos(n * std::acos(x));
    const double v = std::cosh(n * std::acosh(std::abs(x)));
    return (x < 0 && n % 2 == 1) ? -v : v;
}

// Magnitude of the bilinear-transformed type I low-pass at f, scaled so the
// DC gain is exactly 1.
inline double chebyshev_magnitude(int order, double fc, double ripple_db, double fs, double f) {
    const double eps2 = std::pow(10.0, ripple_db / 10.0) - 1.0;
    const double ratio = std::tan(M_PI * f / fs) / std::tan(M_PI * fc / fs);
    const double t0 = cheb_t(order, 0.0);
    const double dc = 1.0 / std::sqrt(1.0 + eps2 * t0 * t0);
    return 1.0 / std::sqrt(1.0 + eps2 * std::pow(cheb_t(order, ratio), 2)) / dc;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

struct Box {
    std::uint32_t x0, y0, w, h;
};

// Bounding box of mean-frame pixels above the midpoint of the mean frame's
// range. Only meaningful for two-level scenes.
inline std::optional<Box> bright_box(const std::vector<std::vector<std::uint16_t>>& frames, std::uint32_t width,
                                     std::uint32_t height) {
    std::vector<double> mf(static_cast<std::size_t>(width) * height, 0.0);
    for (const auto& f : frames)
        for (std::size_t i = 0; i < mf.size(); ++i) mf[i] += f[i];
    const auto [lo, hi] = std::minmax_element(mf.begin(), mf.end());
    if (*hi == *lo) return std::nullopt;
    const double cut = (*lo + *hi) / 2.0;
    std::uint32_t x0 = width, y0 = height, x1 = 0, y1 = 0;
    for (std::uint32_t y = 0; y < height; ++y)
        for (std::uint32_t x = 0; x < width; ++x)
            if (mf[static_cast<std::size_t>(y) * width + x] > cut) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    return Box{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

// np.interp-style resampling of x onto n evenly spaced points.
inline std::vector<double> interp(const std::vector<double>& x, std::size_t n) {
    std::vector<double> out;
    const double span = static_cast<double>(x.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = span * static_cast<double>(i) / static_cast<double>(n - 1);
        const auto k = std::min(static_cast<std::size_t>(pos), x.size() - 2);
        const double frac = pos - static_cast<double>(k);
        out.push_back(x[k] * (1.0 - frac) + x[k + 1] * frac);
    }
    return out;
}

struct Counts {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
};

// Pairwise genuine/impostor loop. Baseline is each user's lowest trial index.
inline std::map<std::string, Counts> auth_counts(const std::vector<std::string>& users,
                                                 const std::vector<int>& trial_index,
                                                 const std::vector<std::optional<double>>& values, double t) {
    std::map<std::string, Counts> out;
    for (std::size_t b = 0; b < users.size(); ++b) {
        bool lowest = true;
        for (std::size_t j = 0; j < users.size(); ++j)
            if (users[j] == users[b] && trial_index[j] < trial_index[b]) lowest = false;
        if (!lowest) continue;
        auto& c = out[users[b]];
        for (std::size_t p = 0; p < users.size(); ++p) {
            const bool accept =
                values[b] && values[p] && std::abs(*values[p] - *values[b]) <= t * std::abs(*values[b]);
            if (users[p] == users[b])
                (accept ? c.tp : c.fn)++;
            else
                (accept ? c.fp : c.tn)++;
        }
    }
    return out;
}

}  // namespace oracle

namespace testutil {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("ppgid_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace testutil
