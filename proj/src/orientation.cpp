#include "fpr/orientation.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <utility>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fpr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEpsilonSq = 1.0;      // px^2, inverse-square kernel regularizer
constexpr double kDegenerateNorm = 1e-9;

double to_half_turn(double a) {
    a = std::fmod(a, kPi);
    if (a < 0.0) a += kPi;
    return a;
}

double minutiae_block_theta(const Template& t, double cx, double cy) {
    double re = 0.0, im = 0.0;
    for (const Minutia& m : t.minutiae) {
        const double dx = cx - m.x, dy = cy - m.y;
        const double w = 1.0 / (kEpsilonSq + dx * dx + dy * dy);
        re += w * std::cos(2.0 * m.direction);
        im += w * std::sin(2.0 * m.direction);
    }
    if (std::hypot(re, im) < kDegenerateNorm) {
        // Degenerate cancellation: nearest minutia wins, lowest index on ties.
        double best = std::numeric_limits<double>::infinity();
        double dir = 0.0;
        for (const Minutia& m : t.minutiae) {
            const double d = std::hypot(cx - m.x, cy - m.y);
            if (d < best) { best = d; dir = m.direction; }
        }
        return to_half_turn(dir);
    }
    double theta = 0.5 * std::atan2(im, re);
    if (theta < 0.0) theta += kPi;
    return theta;
}

template <bool Parallel>
OrientationField field_from_minutiae_impl(const Template& t, const ForegroundMask& mask) {
    if (t.empty()) throw EmptyTemplate("field_from_minutiae");
    if (mask.foreground_count() == 0) throw EmptyForeground("field_from_minutiae");

    OrientationField field{mask.grid, mask, std::vector<double>(mask.flags.size(), 0.0)};
    const int nblocks = mask.grid.count();
#pragma omp parallel for schedule(static) if (Parallel)
    for (int b = 0; b < nblocks; ++b) {
        if (!mask.flags[b]) continue;
        const int bx = b % mask.grid.cols;
        const int by = b / mask.grid.cols;
        field.theta[b] = minutiae_block_theta(t, block_center_x(bx), block_center_y(by));
    }
    return field;
}

struct GradientMoments {
    double gxx = 0.0, gyy = 0.0, gxy = 0.0;
};

GradientMoments block_moments(const GrayImage& img, int bx, int by) {
    GradientMoments m;
    const int bs = BlockGrid::kBlockSize;
    const int x0 = std::max(bx * bs, 1), y0 = std::max(by * bs, 1);
    const int x1 = std::min((bx + 1) * bs, img.width - 1);
    const int y1 = std::min((by + 1) * bs, img.height - 1);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const double gx = (img.at(x + 1, y) - img.at(x - 1, y)) * 0.5;
            const double gy = (img.at(x, y + 1) - img.at(x, y - 1)) * 0.5;
            m.gxx += gx * gx;
            m.gyy += gy * gy;
            m.gxy += gx * gy;
        }
    }
    return m;
}

template <bool Parallel>
OrientationField field_from_image_impl(const GrayImage& image, const ForegroundMask& mask) {
    if (mask.grid != BlockGrid(image.width, image.height))
        throw DimensionMismatch("mask grid does not match image");

    OrientationField field{mask.grid, mask, std::vector<double>(mask.flags.size(), 0.0)};
    std::vector<char> resolved(mask.flags.size(), 0);
    const int nblocks = mask.grid.count();
#pragma omp parallel for schedule(static) if (Parallel)
    for (int b = 0; b < nblocks; ++b) {
        if (!mask.flags[b]) continue;
        const int bx = b % mask.grid.cols;
        const int by = b / mask.grid.cols;
        const GradientMoments m = block_moments(image, bx, by);
        if (m.gxx + m.gyy <= 0.0) continue; // flat block, filled below
        const double grad_dir = 0.5 * std::atan2(2.0 * m.gxy, m.gxx - m.gyy);
        field.theta[b] = to_half_turn(grad_dir + kPi * 0.5);
        resolved[b] = 1;
    }

    // Flat-block fallback: breadth-first copy from the resolved set.
    std::deque<int> queue;
    for (int b = 0; b < nblocks; ++b)
        if (resolved[b]) queue.push_back(b);
    while (!queue.empty()) {
        const int b = queue.front();
        queue.pop_front();
        const int bx = b % mask.grid.cols;
        const int by = b / mask.grid.cols;
        const std::pair<int, int> nbr[4] = {{bx + 1, by}, {bx - 1, by}, {bx, by + 1}, {bx, by - 1}};
        for (auto [nx, ny] : nbr) {
            if (nx < 0 || ny < 0 || nx >= mask.grid.cols || ny >= mask.grid.rows) continue;
            const int nb = mask.grid.index(nx, ny);
            if (!mask.flags[nb] || resolved[nb]) continue;
            field.theta[nb] = field.theta[b];
            resolved[nb] = 1;
            queue.push_back(nb);
        }
    }
    return field;
}

} // namespace

OrientationField field_from_minutiae(const Template& t, const ForegroundMask& mask) {
    return field_from_minutiae_impl<true>(t, mask);
}

OrientationField field_from_image(const GrayImage& image, const ForegroundMask& mask) {
    return field_from_image_impl<true>(image, mask);
}

namespace serial {
OrientationField field_from_minutiae(const Template& t, const ForegroundMask& mask) {
    return field_from_minutiae_impl<false>(t, mask);
}
OrientationField field_from_image(const GrayImage& image, const ForegroundMask& mask) {
    return field_from_image_impl<false>(image, mask);
}
} // namespace serial

double angular_distance(double a, double b) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = -1; k <= 1; ++k) best = std::min(best, std::abs(a - b + k * kPi));
    // Wide inputs can still exceed pi/2 after one wrap; fold them in.
    double d = std::fmod(best, kPi);
    if (d > kPi * 0.5) d = kPi - d;
    return d;
}

std::string dump_field(const OrientationField& field) {
    std::string out;
    char buf[32];
    for (int by = 0; by < field.grid.rows; ++by) {
        for (int bx = 0; bx < field.grid.cols; ++bx) {
            const bool fg = field.mask.block(bx, by);
            std::snprintf(buf, sizeof buf, "%s%.4f", bx ? " " : "", fg ? field.at(bx, by) : -1.0);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace fpr
