#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "fpmod/imgio.hpp"
#include "fpmod/orient.hpp"

namespace testutil {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("fpmod_" + tag + "_" + std::to_string(rd()));
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
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

// Sinusoidal ridges running along direction theta (pixel coordinates),
// period in pixels.
inline fpmod::GrayImage stripes(int w, int h, double theta, double period) {
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    const double nx = -std::sin(theta);
    const double ny = std::cos(theta);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double s = x * nx + y * ny;
            px[static_cast<std::size_t>(y) * w + x] = 0.5 + 0.4 * std::cos(2 * M_PI * s / period);
        }
    }
    return {w, h, std::move(px)};
}

inline fpmod::OrientationField uniform_field(int w, int h, double theta) {
    fpmod::OrientationField f(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            f.set(x, y, theta, 1.0);
        }
    }
    return f;
}

// Smallest angular distance between two orientations (mod pi).
inline double orientation_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), M_PI);
    return std::min(d, M_PI - d);
}

}  // namespace testutil
