#ifndef FPR_IMAGE_HPP
#define FPR_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fpr/errors.hpp"

namespace fpr {

// 8-bit grayscale raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t size() const { return pixels.size(); }

    bool operator==(const GrayImage&) const = default;
};

// Non-overlapping 8x8 pixel blocks covering an image.
struct BlockGrid {
    static constexpr int kBlockSize = 8;
    int cols = 0;
    int rows = 0;

    BlockGrid() = default;
    BlockGrid(int width, int height)
        : cols((width + kBlockSize - 1) / kBlockSize),
          rows((height + kBlockSize - 1) / kBlockSize) {}

    int count() const { return cols * rows; }
    int index(int bx, int by) const { return by * cols + bx; }

    bool operator==(const BlockGrid&) const = default;
};

struct ForegroundMask {
    BlockGrid grid;
    std::vector<bool> flags; // one per block, true = foreground

    ForegroundMask() = default;
    ForegroundMask(const BlockGrid& g, bool fill = false)
        : grid(g), flags(static_cast<size_t>(g.count()), fill) {}

    bool block(int bx, int by) const { return flags[grid.index(bx, by)]; }
    void set_block(int bx, int by, bool v) { flags[grid.index(bx, by)] = v; }
    bool pixel(int x, int y) const { return block(x / BlockGrid::kBlockSize, y / BlockGrid::kBlockSize); }
    int foreground_count() const;

    bool operator==(const ForegroundMask&) const = default;
};

// Full-frame foreground mask for an image of the given dimensions.
ForegroundMask full_frame_mask(int width, int height);

// Binary PGM (P5, maxval 255). Comment lines accepted on read, never written.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& image, const std::string& path);

// Block is foreground iff its intensity variance >= threshold.
// Partial edge blocks use only in-bounds pixels.
ForegroundMask segment(const GrayImage& image, double variance_threshold = 100.0);

// Histogram equalization; constant images are returned unchanged.
GrayImage equalize_histogram(const GrayImage& image);

} // namespace fpr

#endif
