#include "fpr/phase.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace fpr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBs = BlockGrid::kBlockSize;

void check_minutiae_bounds(const Template& t, int width, int height) {
    for (const Minutia& m : t.minutiae)
        if (!(m.x >= 0.0 && m.x < width && m.y >= 0.0 && m.y < height))
            throw OutOfBoundsMinutia("minutia at (" + std::to_string(m.x) + "," + std::to_string(m.y) + ")");
}

template <bool Parallel>
PhaseImage spiral_phase_impl(const Template& t, int width, int height) {
    check_minutiae_bounds(t, width, height);
    PhaseImage out{width, height, full_frame_mask(width, height),
                   std::vector<double>(static_cast<size_t>(width) * height, 0.0)};
    const int npix = width * height;
#pragma omp parallel for schedule(static) if (Parallel)
    for (int i = 0; i < npix; ++i) {
        const double sx = i % width + 0.5;
        const double sy = i / width + 0.5;
        double psi = 0.0;
        for (const Minutia& m : t.minutiae) {
            const double q = m.kind == MinutiaKind::ending ? 1.0 : -1.0;
            psi += q * std::atan2(sy - m.y, sx - m.x);
        }
        out.psi[static_cast<size_t>(i)] = psi;
    }
    return out;
}

struct Plane {
    double gx = 0.0, gy = 0.0; // signed gradient
    double c = 0.0;            // offset
    double eval(double x, double y) const { return gx * x + gy * y + c; }
};

// Sample points on the shared border between block (bx,by) and its
// neighbor one step in (dx,dy).
void edge_samples(int bx, int by, int dx, int dy, double xs[kBs], double ys[kBs]) {
    if (dx != 0) {
        const double xe = (dx > 0 ? bx + 1 : bx) * static_cast<double>(kBs);
        for (int j = 0; j < kBs; ++j) { xs[j] = xe; ys[j] = by * kBs + j + 0.5; }
    } else {
        const double ye = (dy > 0 ? by + 1 : by) * static_cast<double>(kBs);
        for (int j = 0; j < kBs; ++j) { xs[j] = bx * kBs + j + 0.5; ys[j] = ye; }
    }
}

} // namespace

PhaseImage spiral_phase(const Template& t, int width, int height) {
    return spiral_phase_impl<true>(t, width, height);
}

PhaseImage continuous_phase(const OrientationField& field, const FrequencyMap& freq) {
    freq.validate();
    const BlockGrid& grid = field.grid;
    const int nblocks = grid.count();
    if (field.mask.foreground_count() == 0) throw EmptyForeground("continuous_phase");

    // Start at the foreground block nearest the foreground centroid.
    double cx = 0.0, cy = 0.0;
    int nfg = 0;
    for (int b = 0; b < nblocks; ++b) {
        if (!field.mask.flags[b]) continue;
        cx += block_center_x(b % grid.cols);
        cy += block_center_y(b / grid.cols);
        ++nfg;
    }
    cx /= nfg;
    cy /= nfg;
    int start = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nblocks; ++b) {
        if (!field.mask.flags[b]) continue;
        const double d = std::hypot(block_center_x(b % grid.cols) - cx,
                                    block_center_y(b / grid.cols) - cy);
        if (d < best) { best = d; start = b; }
    }

    std::vector<Plane> planes(static_cast<size_t>(nblocks));
    std::vector<char> visited(static_cast<size_t>(nblocks), 0);
    auto base_gradient = [&](int b) {
        const double theta = field.theta[b];
        return std::pair{-2.0 * kPi * freq.value * std::sin(theta),
                         2.0 * kPi * freq.value * std::cos(theta)};
    };

    {
        auto [gx, gy] = base_gradient(start);
        planes[start] = Plane{gx, gy, 0.0};
        visited[start] = 1;
    }
    const std::pair<int, int> steps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

    // Fit a block's sign and offset against every already-resolved
    // neighbor's shared edge; this closes loops as the frontier advances
    // and stops offset drift from accumulating along independent chains.
    // Returns the per-sample mean squared residual of the best fit.
    auto fit_block = [&](int n, Plane& out) {
        const int nx = n % grid.cols, ny = n / grid.cols;
        std::vector<double> xs, ys, ref;
        for (auto [ex, ey] : steps) {
            const int mx = nx + ex, my = ny + ey;
            if (mx < 0 || my < 0 || mx >= grid.cols || my >= grid.rows) continue;
            const int m = grid.index(mx, my);
            if (!field.mask.flags[m] || !visited[m]) continue;
            double exs[kBs], eys[kBs];
            edge_samples(nx, ny, ex, ey, exs, eys);
            for (int j = 0; j < kBs; ++j) {
                xs.push_back(exs[j]);
                ys.push_back(eys[j]);
                ref.push_back(planes[m].eval(exs[j], eys[j]));
            }
        }
        const size_t ns = xs.size();
        auto [gx, gy] = base_gradient(n);
        double cost_of[2], mean_of[2];
        for (int si = 0; si < 2; ++si) {
            const double s = si == 0 ? 1.0 : -1.0;
            double mean = 0.0;
            std::vector<double> r(ns);
            for (size_t j = 0; j < ns; ++j) {
                r[j] = ref[j] - (s * gx * xs[j] + s * gy * ys[j]);
                mean += r[j];
            }
            mean /= static_cast<double>(ns);
            double cost = 0.0;
            for (size_t j = 0; j < ns; ++j) cost += (r[j] - mean) * (r[j] - mean);
            cost_of[si] = cost;
            mean_of[si] = mean;
        }
        int si = cost_of[0] <= cost_of[1] ? 0 : 1;
        // When a shared edge runs along the ridges, both signs fit the
        // edge samples almost equally well; break the near-tie by keeping
        // the gradient aligned with the resolved neighbors instead of
        // trusting residual noise.
        if (std::min(cost_of[0], cost_of[1]) > 0.25 * std::max(cost_of[0], cost_of[1])) {
            double coherence = 0.0;
            const int nx2 = n % grid.cols, ny2 = n / grid.cols;
            for (auto [ex, ey] : steps) {
                const int mx = nx2 + ex, my = ny2 + ey;
                if (mx < 0 || my < 0 || mx >= grid.cols || my >= grid.rows) continue;
                const int m = grid.index(mx, my);
                if (!field.mask.flags[m] || !visited[m]) continue;
                coherence += gx * planes[m].gx + gy * planes[m].gy;
            }
            si = coherence >= 0.0 ? 0 : 1;
        }
        const double s = si == 0 ? 1.0 : -1.0;
        out = Plane{s * gx, s * gy, mean_of[si]};
        return cost_of[si] / static_cast<double>(ns);
    };

    std::deque<int> queue{start};
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        const int vx = v % grid.cols, vy = v / grid.cols;
        for (auto [dx, dy] : steps) {
            const int nx = vx + dx, ny = vy + dy;
            if (nx < 0 || ny < 0 || nx >= grid.cols || ny >= grid.rows) continue;
            const int n = grid.index(nx, ny);
            if (!field.mask.flags[n] || visited[n]) continue;
            Plane fit;
            fit_block(n, fit);
            planes[n] = fit;
            visited[n] = 1;
            queue.push_back(n);
        }
    }

    const int width = grid.cols * kBs, height = grid.rows * kBs;
    PhaseImage out{width, height, field.mask,
                   std::vector<double>(static_cast<size_t>(width) * height, 0.0)};
    for (int b = 0; b < nblocks; ++b) {
        if (!visited[b]) continue;
        const int bx = b % grid.cols, by = b / grid.cols;
        for (int y = by * kBs; y < (by + 1) * kBs; ++y)
            for (int x = bx * kBs; x < (bx + 1) * kBs; ++x)
                out.at(x, y) = planes[b].eval(x + 0.5, y + 0.5);
    }
    return out;
}

namespace {

template <bool Parallel>
GrayImage compose_and_render_impl(const PhaseImage& cont, const PhaseImage& spiral) {
    // The continuous phase is defined on whole blocks; allow it to be the
    // block-rounded cover of the spiral frame.
    if (spiral.width > cont.width || spiral.height > cont.height ||
        cont.width - spiral.width >= kBs || cont.height - spiral.height >= kBs)
        throw DimensionMismatch("phase image dimensions disagree");

    const int width = spiral.width, height = spiral.height;
    GrayImage out(width, height, 255);
    const int npix = width * height;
#pragma omp parallel for schedule(static) if (Parallel)
    for (int i = 0; i < npix; ++i) {
        const int x = i % width, y = i / width;
        if (!cont.mask.pixel(x, y) || !spiral.mask.pixel(x, y)) continue;
        const double psi = cont.at(x, y) + spiral.psi[static_cast<size_t>(i)];
        out.pixels[static_cast<size_t>(i)] =
            static_cast<std::uint8_t>(std::floor(127.5 * (1.0 + std::cos(psi)) + 0.5));
    }
    return out;
}

} // namespace

GrayImage compose_and_render(const PhaseImage& cont, const PhaseImage& spiral) {
    return compose_and_render_impl<true>(cont, spiral);
}

namespace serial {
PhaseImage spiral_phase(const Template& t, int width, int height) {
    return spiral_phase_impl<false>(t, width, height);
}
GrayImage compose_and_render(const PhaseImage& cont, const PhaseImage& spiral) {
    return compose_and_render_impl<false>(cont, spiral);
}
} // namespace serial

ValidationResult validate_minutiae(const Template& t, const GrayImage& rendered,
                                   const ForegroundMask& mask, double radius) {
    if (mask.grid != BlockGrid(rendered.width, rendered.height))
        throw DimensionMismatch("mask grid does not match rendering");
    const Template found = extract_minutiae(rendered, mask);

    ValidationResult result;
    result.kept.width = t.width;
    result.kept.height = t.height;
    std::vector<char> matched(found.size(), 0);
    for (const Minutia& m : t.minutiae) {
        for (size_t j = 0; j < found.size(); ++j) {
            if (std::hypot(m.x - found.minutiae[j].x, m.y - found.minutiae[j].y) <= radius) {
                result.kept.minutiae.push_back(m);
                matched[j] = 1;
                break;
            }
        }
    }
    for (size_t j = 0; j < found.size(); ++j) {
        bool near_input = false;
        for (const Minutia& m : t.minutiae)
            if (std::hypot(m.x - found.minutiae[j].x, m.y - found.minutiae[j].y) <= radius) {
                near_input = true;
                break;
            }
        if (!near_input) ++result.spurious_found;
    }
    return result;
}

namespace {

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Andrew monotone chain; returns hull vertices in counter-clockwise order.
std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<std::pair<double, double>> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2].first, hull[k - 2].second, hull[k - 1].first,
                               hull[k - 1].second, pts[i].first, pts[i].second) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    const size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2].first, hull[k - 2].second, hull[k - 1].first,
                                   hull[k - 1].second, pts[i].first, pts[i].second) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double abx = bx - ax, aby = by - ay;
    const double len2 = abx * abx + aby * aby;
    double u = len2 > 0.0 ? ((px - ax) * abx + (py - ay) * aby) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return std::hypot(px - (ax + u * abx), py - (ay + u * aby));
}

double hull_distance(double px, double py, const std::vector<std::pair<double, double>>& hull) {
    if (hull.size() == 1) return std::hypot(px - hull[0].first, py - hull[0].second);
    if (hull.size() >= 3) {
        bool inside = true;
        for (size_t i = 0; i < hull.size(); ++i) {
            const auto& a = hull[i];
            const auto& b = hull[(i + 1) % hull.size()];
            if (cross(a.first, a.second, b.first, b.second, px, py) < 0.0) { inside = false; break; }
        }
        if (inside) return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        best = std::min(best, segment_distance(px, py, a.first, a.second, b.first, b.second));
    }
    return best;
}

} // namespace

ForegroundMask hull_mask(const Template& t) {
    if (t.empty()) throw EmptyTemplate("hull_mask");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(t.size());
    for (const Minutia& m : t.minutiae) pts.emplace_back(m.x, m.y);
    const auto hull = convex_hull(std::move(pts));

    ForegroundMask mask{BlockGrid(t.width, t.height)};
    const double reach = 2.0 * kBs;
    for (int by = 0; by < mask.grid.rows; ++by)
        for (int bx = 0; bx < mask.grid.cols; ++bx)
            mask.set_block(bx, by, hull_distance(block_center_x(bx), block_center_y(by), hull) <= reach);
    return mask;
}

GrayImage reconstruct(const Template& t, const FrequencyMap& freq, bool full_frame) {
    if (t.empty()) throw EmptyTemplate("reconstruct");
    check_minutiae_bounds(t, t.width, t.height);
    const ForegroundMask mask = full_frame ? full_frame_mask(t.width, t.height) : hull_mask(t);
    const OrientationField field = field_from_minutiae(t, mask);
    const PhaseImage cont = continuous_phase(field, freq);
    const PhaseImage spiral = spiral_phase(t, t.width, t.height);
    return compose_and_render(cont, spiral);
}

} // namespace fpr
