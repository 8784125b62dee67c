#include "fpr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpr/orientation.hpp"

namespace fpr {

namespace {
constexpr double kPi = std::numbers::pi;

double field_theta(const FieldKind& field, double x) {
    if (field.tag == FieldKind::Tag::constant) return field.theta;
    double a = std::fmod(field.amplitude * std::sin(2.0 * kPi * x / field.wavelength), kPi);
    if (a < 0.0) a += kPi;
    return a;
}
} // namespace

std::uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

SynthOutput generate(const SynthSpec& spec) {
    if (spec.width < 1 || spec.height < 1) throw InvalidSpec("empty frame");
    spec.freq.validate();
    const double period = 1.0 / spec.freq.value;
    for (size_t i = 0; i < spec.planted.size(); ++i) {
        const Minutia& m = spec.planted[i];
        if (!(m.x >= 0.0 && m.x < spec.width && m.y >= 0.0 && m.y < spec.height))
            throw InvalidSpec("planted minutia out of bounds");
        for (size_t j = i + 1; j < spec.planted.size(); ++j) {
            const Minutia& n = spec.planted[j];
            if (std::hypot(m.x - n.x, m.y - n.y) < 3.0 * period)
                throw InvalidSpec("planted minutiae closer than three ridge periods");
        }
    }

    const ForegroundMask mask = full_frame_mask(spec.width, spec.height);
    OrientationField field{mask.grid, mask, std::vector<double>(mask.flags.size(), 0.0)};
    for (int by = 0; by < mask.grid.rows; ++by)
        for (int bx = 0; bx < mask.grid.cols; ++bx)
            field.at(bx, by) = field_theta(spec.field, block_center_x(bx));

    Template gt;
    gt.width = spec.width;
    gt.height = spec.height;
    gt.minutiae = spec.planted;

    const PhaseImage cont = continuous_phase(field, spec.freq);
    const PhaseImage spiral = spiral_phase(gt, spec.width, spec.height);
    return {compose_and_render(cont, spiral), std::move(gt)};
}

SynthSpec random_spec(int width, int height, FieldKind field, int count, std::uint64_t seed,
                      FrequencyMap freq, double edge_margin) {
    freq.validate();
    SynthSpec spec;
    spec.width = width;
    spec.height = height;
    spec.field = field;
    spec.seed = seed;
    spec.freq = freq;

    const double period = 1.0 / freq.value;
    const double min_sep = 3.0 * period;
    SplitMix64 rng(seed);
    int attempts = 0;
    const int max_attempts = 10000 * std::max(count, 1);
    while (static_cast<int>(spec.planted.size()) < count) {
        if (++attempts > max_attempts) throw InvalidSpec("cannot place minutiae with required separation");
        Minutia m;
        m.x = rng.next_in(edge_margin, width - edge_margin);
        m.y = rng.next_in(edge_margin, height - edge_margin);
        // A minutia points along the local ridge flow; pick one of the two
        // half-turns at random.
        m.direction = normalize_direction(field_theta(field, m.x) +
                                          (rng.next_unit() < 0.5 ? 0.0 : kPi));
        m.kind = rng.next_unit() < 0.5 ? MinutiaKind::ending : MinutiaKind::bifurcation;
        bool ok = true;
        for (const Minutia& p : spec.planted)
            if (std::hypot(m.x - p.x, m.y - p.y) < min_sep) { ok = false; break; }
        if (ok) spec.planted.push_back(m);
    }
    return spec;
}

SynthOutput perturb(const GrayImage& image, const Template& t, double dx, double dy, double rot,
                    double dropout, std::uint64_t seed) {
    const double cx = image.width / 2.0, cy = image.height / 2.0;
    const double c = std::cos(rot), s = std::sin(rot);

    // Inverse map each output pixel into the source image.
    GrayImage out(image.width, image.height, 255);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const double ox = x + 0.5 - cx - dx;
            const double oy = y + 0.5 - cy - dy;
            const double sx = c * ox + s * oy + cx - 0.5;
            const double sy = -s * ox + c * oy + cy - 0.5;
            if (sx < -0.5 || sy < -0.5 || sx > image.width - 0.5 || sy > image.height - 0.5) continue;
            const double csx = std::clamp(sx, 0.0, image.width - 1.0);
            const double csy = std::clamp(sy, 0.0, image.height - 1.0);
            const int x0 = std::min(static_cast<int>(std::floor(csx)), image.width - 2);
            const int y0 = std::min(static_cast<int>(std::floor(csy)), image.height - 2);
            const double fx = csx - x0, fy = csy - y0;
            const double v = (1 - fx) * (1 - fy) * image.at(x0, y0) +
                             fx * (1 - fy) * image.at(x0 + 1, y0) +
                             (1 - fx) * fy * image.at(x0, y0 + 1) +
                             fx * fy * image.at(x0 + 1, y0 + 1);
            out.at(x, y) = static_cast<std::uint8_t>(std::floor(v + 0.5));
        }
    }

    Template tp;
    tp.width = t.width;
    tp.height = t.height;
    SplitMix64 rng(seed);
    for (const Minutia& m : t.minutiae) {
        const bool drop = rng.next_unit() < dropout;
        if (drop) continue;
        Minutia n = m;
        const double px = m.x - cx, py = m.y - cy;
        n.x = c * px - s * py + cx + dx;
        n.y = s * px + c * py + cy + dy;
        n.direction = normalize_direction(m.direction + rot);
        if (!(n.x >= 0.0 && n.x < t.width && n.y >= 0.0 && n.y < t.height)) continue;
        tp.minutiae.push_back(n);
    }
    return {std::move(out), std::move(tp)};
}

} // namespace fpr
