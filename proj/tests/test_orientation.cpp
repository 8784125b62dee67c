#include <doctest.h>

#include <cmath>

#include "fpr/orientation.hpp"
#include "fpr/phase.hpp"
#include "fpr/synth.hpp"
#include "support.hpp"

using namespace fpr;
using namespace fpr_test;

TEST_CASE("field_from_minutiae single minutia gives a constant field") {
    Template t;
    t.width = t.height = 64;
    t.minutiae.push_back({30.0, 30.0, 5.0 * kPi / 6.0, MinutiaKind::ending});
    const ForegroundMask mask = full_frame_mask(64, 64);
    const OrientationField f = field_from_minutiae(t, mask);
    for (int by = 0; by < f.grid.rows; ++by)
        for (int bx = 0; bx < f.grid.cols; ++bx)
            CHECK(f.at(bx, by) == doctest::Approx(5.0 * kPi / 6.0).epsilon(1e-12));
}

TEST_CASE("field_from_minutiae blends equidistant directions in the doubled domain") {
    // Block (1,0) of a 24x8 frame has center (12,4); minutiae at (4,4) and
    // (20,4) are equidistant from it.
    Template t;
    t.width = 24;
    t.height = 8;
    t.minutiae.push_back({4.0, 4.0, 0.0, MinutiaKind::ending});
    t.minutiae.push_back({20.0, 4.0, kPi / 4.0, MinutiaKind::ending});
    const OrientationField f = field_from_minutiae(t, full_frame_mask(24, 8));
    // doubled-angle vectors (1,0) and (0,1) sum to angle pi/4, halved to pi/8
    CHECK(f.at(1, 0) == doctest::Approx(kPi / 8.0).epsilon(1e-12));
}

TEST_CASE("field_from_minutiae degenerate cancellation falls back to nearest minutia") {
    Template t;
    t.width = 24;
    t.height = 8;
    t.minutiae.push_back({4.0, 4.0, 0.0, MinutiaKind::ending});
    t.minutiae.push_back({20.0, 4.0, kPi / 2.0, MinutiaKind::ending});
    const OrientationField f = field_from_minutiae(t, full_frame_mask(24, 8));
    CHECK(f.at(1, 0) == doctest::Approx(0.0)); // tie -> lowest index
}

TEST_CASE("field_from_minutiae error cases") {
    Template t;
    t.width = t.height = 16;
    CHECK_THROWS_AS(field_from_minutiae(t, full_frame_mask(16, 16)), EmptyTemplate);
    t.minutiae.push_back({8.0, 8.0, 0.0, MinutiaKind::ending});
    ForegroundMask empty(BlockGrid(16, 16), false);
    CHECK_THROWS_AS(field_from_minutiae(t, empty), EmptyForeground);
}

TEST_CASE("field_from_minutiae is invariant under direction flips") {
    Template t, flipped;
    t.width = t.height = flipped.width = flipped.height = 80;
    SplitMix64 rng(5);
    for (int i = 0; i < 6; ++i) {
        Minutia m{rng.next_in(5.0, 75.0), rng.next_in(5.0, 75.0), rng.next_in(0.0, kPi),
                  MinutiaKind::ending};
        t.minutiae.push_back(m);
        m.direction = normalize_direction(m.direction + kPi);
        flipped.minutiae.push_back(m);
    }
    const ForegroundMask mask = full_frame_mask(80, 80);
    const OrientationField a = field_from_minutiae(t, mask);
    const OrientationField b = field_from_minutiae(flipped, mask);
    for (size_t i = 0; i < a.theta.size(); ++i)
        CHECK(std::abs(a.theta[i] - b.theta[i]) <= 1e-12);
}

TEST_CASE("field outputs lie in [0, pi)") {
    const auto check_range = [](const OrientationField& f) {
        for (int b = 0; b < f.grid.count(); ++b) {
            if (!f.mask.flags[b]) continue;
            CHECK(f.theta[b] >= 0.0);
            CHECK(f.theta[b] < kPi);
        }
    };
    Template t;
    t.width = t.height = 64;
    SplitMix64 rng(9);
    for (int i = 0; i < 5; ++i)
        t.minutiae.push_back({rng.next_in(4.0, 60.0), rng.next_in(4.0, 60.0),
                              rng.next_in(0.0, 2.0 * kPi), MinutiaKind::bifurcation});
    check_range(field_from_minutiae(t, full_frame_mask(64, 64)));

    const GrayImage img = random_image(64, 64, 3);
    check_range(field_from_image(img, full_frame_mask(64, 64)));
}

TEST_CASE("field_from_image recovers analytic sinusoid orientations") {
    const int n = 72;
    // horizontal ridges: intensity varies along y only -> theta ~ 0
    GrayImage horizontal(n, n), vertical(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            horizontal.at(x, y) = static_cast<std::uint8_t>(
                std::lround(127.5 * (1.0 + std::cos(2.0 * kPi * y / 9.0))));
            vertical.at(x, y) = static_cast<std::uint8_t>(
                std::lround(127.5 * (1.0 + std::cos(2.0 * kPi * x / 9.0))));
        }
    const ForegroundMask mask = full_frame_mask(n, n);
    const OrientationField fh = field_from_image(horizontal, mask);
    const OrientationField fv = field_from_image(vertical, mask);
    for (int by = 1; by < fh.grid.rows - 1; ++by)
        for (int bx = 1; bx < fh.grid.cols - 1; ++bx) {
            CHECK(angular_distance(fh.at(bx, by), 0.0) <= 0.05);
            CHECK(angular_distance(fv.at(bx, by), kPi / 2.0) <= 0.05);
        }
}

TEST_CASE("field_from_image flat blocks copy a resolved neighbor") {
    const int n = 32;
    GrayImage img(n, n, 128);
    // left half ridged, right half flat
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < 16; ++x)
            img.at(x, y) = static_cast<std::uint8_t>(
                std::lround(127.5 * (1.0 + std::cos(2.0 * kPi * y / 9.0))));
    const OrientationField f = field_from_image(img, full_frame_mask(n, n));
    // bx=3 blocks have zero gradient energy; they must copy their resolved
    // neighbor at bx=2 exactly (bx=2 picks up the half-boundary gradients).
    for (int by = 0; by < f.grid.rows; ++by)
        CHECK(f.at(3, by) == f.at(2, by));
}

TEST_CASE("angular_distance") {
    CHECK(angular_distance(0.0, kPi) == doctest::Approx(0.0));
    CHECK(angular_distance(0.0, kPi / 2.0) == doctest::Approx(kPi / 2.0));
    CHECK(angular_distance(0.1, 3.1) == doctest::Approx(std::abs(0.1 - 3.1 + kPi)));
}

TEST_CASE("orientation round-trip through rendering") {
    // render ridges from a constant field, re-estimate, compare
    for (double theta : {0.3, 1.2, 2.6}) {
        Template t;
        t.width = t.height = 160;
        t.minutiae.push_back({80.0, 80.0, theta, MinutiaKind::ending});
        const ForegroundMask mask = full_frame_mask(160, 160);
        const OrientationField field = field_from_minutiae(t, mask);
        const PhaseImage cont = continuous_phase(field, {});
        Template empty;
        empty.width = empty.height = 160;
        const PhaseImage spiral = spiral_phase(empty, 160, 160);
        const GrayImage img = compose_and_render(cont, spiral);
        const OrientationField back = field_from_image(img, mask);
        double sum = 0.0;
        int count = 0;
        for (int by = 1; by < back.grid.rows - 1; ++by)
            for (int bx = 1; bx < back.grid.cols - 1; ++bx) {
                sum += angular_distance(back.at(bx, by), theta);
                ++count;
            }
        CHECK(sum / count <= 0.1);
    }
}

TEST_CASE("dump_field emits one 4-decimal row per block row") {
    Template t;
    t.width = 16;
    t.height = 8;
    t.minutiae.push_back({8.0, 4.0, 1.0, MinutiaKind::ending});
    const OrientationField f = field_from_minutiae(t, full_frame_mask(16, 8));
    CHECK(dump_field(f) == "1.0000 1.0000\n");
}
