#ifndef FPR_MINUTIAE_HPP
#define FPR_MINUTIAE_HPP

#include <string>
#include <vector>

#include "fpr/image.hpp"

namespace fpr {

enum class MinutiaKind { ending, bifurcation };

char kind_char(MinutiaKind k);

// Point feature: location, direction in [0, 2*pi), and kind.
// Ending direction points along the ridge away from the ridge body;
// bifurcation direction is the opposite of the mean branch direction.
struct Minutia {
    double x = 0.0;
    double y = 0.0;
    double direction = 0.0;
    MinutiaKind kind = MinutiaKind::ending;
};

struct Template {
    int width = 0;
    int height = 0;
    std::vector<Minutia> minutiae;

    bool empty() const { return minutiae.empty(); }
    size_t size() const { return minutiae.size(); }
};

// Normalizes an angle into [0, 2*pi).
double normalize_direction(double a);

// Foreground pixels: 0 (ridge) where intensity < per-block mean, else 255.
// Background pixels are always 255.
GrayImage binarize(const GrayImage& image, const ForegroundMask& mask);

// Iterative two-subiteration thinning of ridge (0) pixels to a
// one-pixel-wide 8-connected skeleton. Idempotent.
GrayImage thin(const GrayImage& binary);

// Crossing number at an interior skeleton pixel:
// half the sum of |p_i - p_{i+1}| over the 8-neighbor ring (cyclic).
int crossing_number(const GrayImage& skeleton, int x, int y);

// Full forward extraction: binarize -> thin -> crossing-number scan,
// then border-margin and minimum-separation filtering.
Template extract_minutiae(const GrayImage& image, const ForegroundMask& mask,
                          double border_margin = 10.0, double min_separation = 5.0);

// Text template format: "width height" then one "x y direction kind" line
// per minutia, kind in {E, B}, direction in radians with 6 decimals.
void write_template(const Template& t, const std::string& path);
Template read_template(const std::string& path);
std::string format_template(const Template& t);
Template parse_template(const std::string& text);

} // namespace fpr

#endif
