#include "fpr/minutiae.hpp"

#include "fpr/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace fpr {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kTraceLength = 5;
} // namespace

char kind_char(MinutiaKind k) { return k == MinutiaKind::ending ? 'E' : 'B'; }

double normalize_direction(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    if (a >= 2.0 * kPi) a = 0.0;
    return a;
}

GrayImage binarize(const GrayImage& image, const ForegroundMask& mask) {
    if (mask.grid != BlockGrid(image.width, image.height))
        throw DimensionMismatch("mask grid does not match image");
    GrayImage out(image.width, image.height, 255);
    const int bs = BlockGrid::kBlockSize;
    for (int by = 0; by < mask.grid.rows; ++by) {
        for (int bx = 0; bx < mask.grid.cols; ++bx) {
            if (!mask.block(bx, by)) continue;
            const int x0 = bx * bs, y0 = by * bs;
            const int x1 = std::min(x0 + bs, image.width);
            const int y1 = std::min(y0 + bs, image.height);
            double sum = 0.0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) sum += image.at(x, y);
            const double mean = sum / ((x1 - x0) * (y1 - y0));
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    out.at(x, y) = image.at(x, y) < mean ? 0 : 255;
        }
    }
    return out;
}

namespace {

void require_binary(const GrayImage& img) {
    for (std::uint8_t v : img.pixels)
        if (v != 0 && v != 255) throw NotBinary("pixel value " + std::to_string(v));
}

// 8-neighbor ring starting north, clockwise: N NE E SE S SW W NW.
constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

inline bool ridge_at(const GrayImage& img, int x, int y) {
    return img.in_bounds(x, y) && img.at(x, y) == 0;
}

} // namespace

GrayImage thin(const GrayImage& binary) {
    require_binary(binary);
    GrayImage img = binary;
    const int w = img.width, h = img.height;
    std::vector<std::pair<int, int>> to_delete;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int sub = 0; sub < 2; ++sub) {
            to_delete.clear();
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (img.at(x, y) != 0) continue;
                    int p[8];
                    for (int k = 0; k < 8; ++k) p[k] = ridge_at(img, x + kNx[k], y + kNy[k]) ? 1 : 0;
                    int b = 0;
                    for (int k = 0; k < 8; ++k) b += p[k];
                    if (b < 2 || b > 6) continue;
                    int a = 0;
                    for (int k = 0; k < 8; ++k)
                        if (p[k] == 0 && p[(k + 1) % 8] == 1) ++a;
                    if (a != 1) continue;
                    // p[0]=N, p[2]=E, p[4]=S, p[6]=W
                    if (sub == 0) {
                        if (p[0] * p[2] * p[4] != 0) continue;
                        if (p[2] * p[4] * p[6] != 0) continue;
                    } else {
                        if (p[0] * p[2] * p[6] != 0) continue;
                        if (p[0] * p[4] * p[6] != 0) continue;
                    }
                    to_delete.emplace_back(x, y);
                }
            }
            for (auto [x, y] : to_delete) img.at(x, y) = 255;
            if (!to_delete.empty()) changed = true;
        }
    }
    return img;
}

int crossing_number(const GrayImage& skeleton, int x, int y) {
    if (x < 1 || y < 1 || x >= skeleton.width - 1 || y >= skeleton.height - 1)
        throw OutOfBounds("crossing_number at (" + std::to_string(x) + "," + std::to_string(y) + ")");
    int p[8];
    for (int k = 0; k < 8; ++k) p[k] = skeleton.at(x + kNx[k], y + kNy[k]) == 0 ? 1 : 0;
    int sum = 0;
    for (int k = 0; k < 8; ++k) sum += std::abs(p[k] - p[(k + 1) % 8]);
    return sum / 2;
}

namespace {

struct Pt {
    int x, y;
    bool operator==(const Pt&) const = default;
};

// Walks the skeleton from `start` (a neighbor of the minutia pixel) for up
// to kTraceLength steps, never revisiting a pixel. `blocked` seeds the
// visited set so sibling branches of a junction stay separate. Returns the
// end point.
Pt trace_branch(const GrayImage& skel, Pt origin, Pt start,
                const std::vector<Pt>& blocked = {}) {
    std::vector<Pt> visited{origin, start};
    visited.insert(visited.end(), blocked.begin(), blocked.end());
    Pt cur = start;
    for (int step = 1; step < kTraceLength; ++step) {
        Pt next{-1, -1};
        for (int k = 0; k < 8; ++k) {
            Pt cand{cur.x + kNx[k], cur.y + kNy[k]};
            if (!ridge_at(skel, cand.x, cand.y)) continue;
            if (std::find(visited.begin(), visited.end(), cand) != visited.end()) continue;
            next = cand;
            break;
        }
        if (next.x < 0) break;
        visited.push_back(next);
        cur = next;
    }
    return cur;
}

double ending_direction(const GrayImage& skel, Pt p) {
    // Single ridge neighbor; trace along it, then point away from the ridge.
    Pt start{-1, -1};
    for (int k = 0; k < 8; ++k)
        if (ridge_at(skel, p.x + kNx[k], p.y + kNy[k])) { start = {p.x + kNx[k], p.y + kNy[k]}; break; }
    if (start.x < 0) return 0.0;
    Pt t = trace_branch(skel, p, start);
    return normalize_direction(std::atan2(p.y - t.y, p.x - t.x));
}

double bifurcation_direction(const GrayImage& skel, Pt p, double ridge_theta) {
    // Group the ring neighbors into runs of consecutive ridge pixels; each
    // run is one branch (a run can span two adjacent ring positions).
    int ring[8];
    for (int k = 0; k < 8; ++k)
        ring[k] = ridge_at(skel, p.x + kNx[k], p.y + kNy[k]) ? 1 : 0;
    int first = -1;
    for (int k = 0; k < 8 && first < 0; ++k)
        if (ring[k] == 0 && ring[(k + 1) % 8] == 1) first = (k + 1) % 8;
    std::vector<Pt> starts, all;
    for (int k = 0; k < 8; ++k)
        if (ring[k]) all.push_back({p.x + kNx[k], p.y + kNy[k]});
    if (first >= 0) {
        for (int k = first, seen = 0; seen < 8; ++seen, k = (k + 1) % 8) {
            if (!ring[k]) continue;
            if (ring[(k + 7) % 8] && k != first) continue; // same run as predecessor
            starts.push_back({p.x + kNx[k], p.y + kNy[k]});
        }
    } else {
        starts = all;
    }
    std::vector<double> dirs;
    for (const Pt& s : starts) {
        const Pt t = trace_branch(skel, p, s, all);
        dirs.push_back(std::atan2(t.y - p.y, t.x - p.x));
    }
    if (dirs.empty()) return 0.0;
    // The two fork branches run nearly parallel; their bisector is the
    // valley direction. The mean of all three is unstable once the fork
    // opens past 120 degrees. Bridging artifacts at ridge dislocations add
    // branches that run across the flow, so pick the pair whose bisector
    // best matches the local block orientation.
    if (dirs.size() >= 2) {
        double best_dir = 0.0;
        double best_err = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < dirs.size(); ++i) {
            for (size_t j = i + 1; j < dirs.size(); ++j) {
                const double sx = std::cos(dirs[i]) + std::cos(dirs[j]);
                const double sy = std::sin(dirs[i]) + std::sin(dirs[j]);
                if (sx * sx + sy * sy < 1e-12) continue; // antiparallel pair
                const double bis = std::atan2(sy, sx);
                const double err = angular_distance(bis, ridge_theta);
                if (err < best_err) {
                    best_err = err;
                    best_dir = bis;
                }
            }
        }
        if (std::isfinite(best_err)) return normalize_direction(best_dir);
    }
    return normalize_direction(std::atan2(-std::sin(dirs[0]), -std::cos(dirs[0])));
}

// Distance from a point to the nearest background region: background
// blocks and the image frame both count as boundary.
double boundary_distance(double px, double py, const GrayImage& img, const ForegroundMask& mask) {
    double best = std::min({px, py, img.width - px, img.height - py});
    const int bs = BlockGrid::kBlockSize;
    for (int by = 0; by < mask.grid.rows; ++by) {
        for (int bx = 0; bx < mask.grid.cols; ++bx) {
            if (mask.block(bx, by)) continue;
            const double x0 = bx * bs, y0 = by * bs;
            const double x1 = std::min<double>(x0 + bs, img.width);
            const double y1 = std::min<double>(y0 + bs, img.height);
            const double dx = std::max({x0 - px, 0.0, px - x1});
            const double dy = std::max({y0 - py, 0.0, py - y1});
            best = std::min(best, std::hypot(dx, dy));
        }
    }
    return best;
}

} // namespace

Template extract_minutiae(const GrayImage& image, const ForegroundMask& mask,
                          double border_margin, double min_separation) {
    if (mask.grid != BlockGrid(image.width, image.height))
        throw DimensionMismatch("mask grid does not match image");

    Template t;
    t.width = image.width;
    t.height = image.height;
    if (mask.foreground_count() == 0) return t;

    const GrayImage skel = thin(binarize(image, mask));
    const OrientationField ofield = field_from_image(image, mask);
    for (int y = 1; y < image.height - 1; ++y) {
        for (int x = 1; x < image.width - 1; ++x) {
            if (skel.at(x, y) != 0 || !mask.pixel(x, y)) continue;
            const int cn = crossing_number(skel, x, y);
            if (cn != 1 && cn != 3) continue;
            Minutia m;
            m.x = x;
            m.y = y;
            if (cn == 1) {
                m.kind = MinutiaKind::ending;
                m.direction = ending_direction(skel, {x, y});
            } else {
                m.kind = MinutiaKind::bifurcation;
                m.direction = bifurcation_direction(
                    skel, {x, y}, ofield.at(x / BlockGrid::kBlockSize, y / BlockGrid::kBlockSize));
            }
            if (boundary_distance(m.x, m.y, image, mask) < border_margin) continue;
            t.minutiae.push_back(m);
        }
    }

    // Closest-pair removal: the later-listed minutia of each offending
    // pair is dropped.
    bool removed = true;
    while (removed && t.minutiae.size() > 1) {
        removed = false;
        double best = std::numeric_limits<double>::infinity();
        size_t bi = 0, bj = 0;
        for (size_t i = 0; i + 1 < t.minutiae.size(); ++i) {
            for (size_t j = i + 1; j < t.minutiae.size(); ++j) {
                const double d = std::hypot(t.minutiae[i].x - t.minutiae[j].x,
                                            t.minutiae[i].y - t.minutiae[j].y);
                if (d < best) { best = d; bi = i; bj = j; }
            }
        }
        if (best < min_separation) {
            t.minutiae.erase(t.minutiae.begin() + static_cast<long>(bj));
            (void)bi;
            removed = true;
        }
    }
    return t;
}

std::string format_template(const Template& t) {
    std::string out = std::to_string(t.width) + " " + std::to_string(t.height) + "\n";
    char line[128];
    for (const Minutia& m : t.minutiae) {
        std::snprintf(line, sizeof line, "%.6f %.6f %.6f %c\n", m.x, m.y, m.direction, kind_char(m.kind));
        out += line;
    }
    return out;
}

void write_template(const Template& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << format_template(t);
    if (!out) throw IoFailure("write failed for " + path);
}

Template parse_template(const std::string& text) {
    std::istringstream in(text);
    Template t;
    std::string line;
    if (!std::getline(in, line)) throw MalformedTemplate("empty file");
    {
        std::istringstream hdr(line);
        if (!(hdr >> t.width >> t.height) || t.width < 1 || t.height < 1)
            throw MalformedTemplate("bad header '" + line + "'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        Minutia m;
        std::string kind;
        if (!(row >> m.x >> m.y >> m.direction >> kind))
            throw MalformedTemplate("bad minutia line '" + line + "'");
        std::string extra;
        if (row >> extra) throw MalformedTemplate("trailing fields in '" + line + "'");
        if (kind == "E") m.kind = MinutiaKind::ending;
        else if (kind == "B") m.kind = MinutiaKind::bifurcation;
        else throw MalformedTemplate("bad kind token '" + kind + "'");
        if (!(m.x >= 0.0 && m.x < t.width && m.y >= 0.0 && m.y < t.height))
            throw MalformedTemplate("out-of-bounds minutia in '" + line + "'");
        if (!std::isfinite(m.direction)) throw MalformedTemplate("non-finite direction");
        m.direction = normalize_direction(m.direction);
        for (const Minutia& prev : t.minutiae)
            if (prev.x == m.x && prev.y == m.y)
                throw MalformedTemplate("duplicate minutia location in '" + line + "'");
        t.minutiae.push_back(m);
    }
    return t;
}

Template read_template(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_template(buf.str());
}

} // namespace fpr
