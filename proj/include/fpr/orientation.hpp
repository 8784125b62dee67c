#ifndef FPR_ORIENTATION_HPP
#define FPR_ORIENTATION_HPP

#include <string>
#include <vector>

#include "fpr/image.hpp"
#include "fpr/minutiae.hpp"

namespace fpr {

// Blockwise ridge orientation, radians in [0, pi), defined on foreground
// blocks. Background entries hold 0 and are never read.
struct OrientationField {
    BlockGrid grid;
    ForegroundMask mask;
    std::vector<double> theta; // one per block, indexed like mask.flags

    double at(int bx, int by) const { return theta[grid.index(bx, by)]; }
    double& at(int bx, int by) { return theta[grid.index(bx, by)]; }
};

// Center of a block in the continuous pixel coordinate frame.
inline double block_center_x(int bx) { return bx * BlockGrid::kBlockSize + 4.0; }
inline double block_center_y(int by) { return by * BlockGrid::kBlockSize + 4.0; }

// Inverse-square-distance weighted average of minutia directions in the
// doubled-angle domain; constant when only one minutia is available.
OrientationField field_from_minutiae(const Template& t, const ForegroundMask& mask);

// Averaged squared-gradient orientation estimate per foreground block.
// Blocks with zero gradient energy copy the nearest resolved block.
OrientationField field_from_image(const GrayImage& image, const ForegroundMask& mask);

// min over k in {-1,0,1} of |a - b + k*pi|; range [0, pi/2].
double angular_distance(double a, double b);

// Debug dump: one row of 4-decimal theta values per block row.
std::string dump_field(const OrientationField& field);

namespace serial {
OrientationField field_from_minutiae(const Template& t, const ForegroundMask& mask);
OrientationField field_from_image(const GrayImage& image, const ForegroundMask& mask);
} // namespace serial

} // namespace fpr

#endif
