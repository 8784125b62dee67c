#include "fpr/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace fpr {

int ForegroundMask::foreground_count() const {
    int n = 0;
    for (bool f : flags) n += f ? 1 : 0;
    return n;
}

ForegroundMask full_frame_mask(int width, int height) {
    return ForegroundMask(BlockGrid(width, height), true);
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(c));
            if (c == '#') in.unget();
            break;
        }
    }
    return tok;
}

int parse_header_int(const std::string& tok) {
    if (tok.empty()) throw MalformedPgm("truncated header");
    for (char ch : tok)
        if (!std::isdigit(static_cast<unsigned char>(ch))) throw MalformedPgm("non-numeric header field '" + tok + "'");
    return std::stoi(tok);
}

} // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);

    std::string magic = next_token(in);
    if (magic != "P5") throw MalformedPgm("bad magic '" + magic + "'");
    int width = parse_header_int(next_token(in));
    int height = parse_header_int(next_token(in));
    int maxval = parse_header_int(next_token(in));
    if (width < 1 || height < 1) throw MalformedPgm("bad dimensions");
    if (maxval != 255) throw MalformedPgm("maxval must be 255");

    GrayImage img(width, height);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.size()));
    if (static_cast<size_t>(in.gcount()) != img.size()) throw MalformedPgm("truncated pixel data");
    return img;
}

void write_pgm(const GrayImage& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.size()));
    if (!out) throw IoFailure("write failed for " + path);
}

ForegroundMask segment(const GrayImage& image, double variance_threshold) {
    BlockGrid grid(image.width, image.height);
    ForegroundMask mask(grid);
    for (int by = 0; by < grid.rows; ++by) {
        for (int bx = 0; bx < grid.cols; ++bx) {
            const int x0 = bx * BlockGrid::kBlockSize;
            const int y0 = by * BlockGrid::kBlockSize;
            const int x1 = std::min(x0 + BlockGrid::kBlockSize, image.width);
            const int y1 = std::min(y0 + BlockGrid::kBlockSize, image.height);
            double sum = 0.0, sum2 = 0.0;
            const int n = (x1 - x0) * (y1 - y0);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    const double v = image.at(x, y);
                    sum += v;
                    sum2 += v * v;
                }
            const double mean = sum / n;
            const double var = sum2 / n - mean * mean;
            mask.set_block(bx, by, var >= variance_threshold);
        }
    }
    return mask;
}

GrayImage equalize_histogram(const GrayImage& image) {
    size_t hist[256] = {};
    for (std::uint8_t v : image.pixels) ++hist[v];

    size_t cdf[256];
    size_t running = 0;
    for (int v = 0; v < 256; ++v) {
        running += hist[v];
        cdf[v] = running;
    }
    size_t cdf_min = 0;
    for (int v = 0; v < 256; ++v)
        if (cdf[v] > 0) { cdf_min = cdf[v]; break; }

    const size_t n = image.size();
    if (cdf_min == n) return image; // single-intensity image

    std::uint8_t map[256];
    for (int v = 0; v < 256; ++v) {
        const double h = static_cast<double>(cdf[v] - std::min(cdf[v], cdf_min)) /
                         static_cast<double>(n - cdf_min) * 255.0;
        map[v] = static_cast<std::uint8_t>(std::lround(h));
    }
    GrayImage out(image.width, image.height);
    for (size_t i = 0; i < n; ++i) out.pixels[i] = map[image.pixels[i]];
    return out;
}

} // namespace fpr
