#ifndef FPR_PHASE_HPP
#define FPR_PHASE_HPP

#include <utility>
#include <vector>

#include "fpr/image.hpp"
#include "fpr/minutiae.hpp"
#include "fpr/orientation.hpp"

namespace fpr {

// Constant ridge frequency over the foreground, cycles/pixel.
struct FrequencyMap {
    double value = 1.0 / 9.0;

    void validate() const {
        if (!(value >= 1.0 / 20.0 && value <= 1.0 / 3.0))
            throw InvalidSpec("ridge frequency outside [1/20, 1/3]");
    }
};

// Real-valued phase per pixel, defined on pixels of foreground blocks.
// Sampled on the offset grid (x+0.5, y+0.5).
struct PhaseImage {
    int width = 0;
    int height = 0;
    ForegroundMask mask;
    std::vector<double> psi;

    double at(int x, int y) const { return psi[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return psi[static_cast<size_t>(y) * width + x]; }
};

// Sum of atan2 spirals, +1 per ending and -1 per bifurcation, over a
// full-frame mask.
PhaseImage spiral_phase(const Template& t, int width, int height);

// Per-block planar phase with gradient 2*pi*f*(-sin theta, cos theta);
// signs and offsets assigned by breadth-first edge matching from the
// block nearest the foreground centroid. Sequential by construction.
PhaseImage continuous_phase(const OrientationField& field, const FrequencyMap& freq);

// round(127.5*(1+cos(psi_c+psi_s))) on foreground, 255 on background.
// Round-half-up quantization.
GrayImage compose_and_render(const PhaseImage& cont, const PhaseImage& spiral);

struct ValidationResult {
    Template kept;
    int spurious_found = 0;
};

// Re-extracts minutiae from a rendering and keeps the input minutiae that
// have an extracted counterpart within `radius` pixels.
ValidationResult validate_minutiae(const Template& t, const GrayImage& rendered,
                                   const ForegroundMask& mask, double radius = 8.0);

// Foreground = blocks within two block widths of the minutiae convex hull.
ForegroundMask hull_mask(const Template& t);

// Full reconstruction pipeline: mask -> orientation field -> continuous
// phase -> spiral phase -> rendering.
GrayImage reconstruct(const Template& t, const FrequencyMap& freq = {}, bool full_frame = false);

namespace serial {
PhaseImage spiral_phase(const Template& t, int width, int height);
GrayImage compose_and_render(const PhaseImage& cont, const PhaseImage& spiral);
} // namespace serial

} // namespace fpr

#endif
