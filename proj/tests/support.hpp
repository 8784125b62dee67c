#ifndef FPR_TESTS_SUPPORT_HPP
#define FPR_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "fpr/image.hpp"

namespace fpr_test {

inline constexpr double kPi = std::numbers::pi;

// Wraps a phase difference into (-pi, pi].
inline double wrap_phase(double d) {
    while (d > kPi) d -= 2.0 * kPi;
    while (d <= -kPi) d += 2.0 * kPi;
    return d;
}

// Net unwrapped phase change around the rectangular loop `inset` pixels
// in from the frame, counter-clockwise. Independent oracle for winding
// counts: each enclosed spiral contributes +-2*pi.
inline double frame_circulation(const std::function<double(int, int)>& psi, int width, int height,
                                int inset = 1) {
    const int x0 = inset, x1 = width - 1 - inset;
    const int y0 = inset, y1 = height - 1 - inset;
    double sum = 0.0;
    double prev = psi(x0, y0);
    auto step = [&](int x, int y) {
        const double cur = psi(x, y);
        sum += wrap_phase(cur - prev);
        prev = cur;
    };
    for (int x = x0 + 1; x <= x1; ++x) step(x, y0);
    for (int y = y0 + 1; y <= y1; ++y) step(x1, y);
    for (int x = x1 - 1; x >= x0; --x) step(x, y1);
    for (int y = y1 - 1; y >= y0; --y) step(x0, y);
    return sum;
}

inline fpr::GrayImage random_image(int width, int height, std::uint32_t seed) {
    std::mt19937 rng(seed);
    fpr::GrayImage img(width, height);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xFF);
    return img;
}

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

} // namespace fpr_test

#endif
