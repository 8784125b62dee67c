#include <doctest.h>

#include <cmath>

#include "fpr/matching.hpp"
#include "fpr/synth.hpp"
#include "support.hpp"

using namespace fpr;
using namespace fpr_test;

TEST_CASE("generate is deterministic") {
    const auto spec = random_spec(160, 160, FieldKind::constant(0.9), 6, 42);
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(a.image == b.image);
    REQUIRE(a.ground_truth.size() == b.ground_truth.size());
    for (size_t i = 0; i < a.ground_truth.size(); ++i)
        CHECK(a.ground_truth.minutiae[i].x == b.ground_truth.minutiae[i].x);
}

TEST_CASE("ridge period of a plain horizontal field is the frequency reciprocal") {
    SynthSpec spec;
    spec.width = spec.height = 128;
    spec.field = FieldKind::constant(0.0);
    const auto out = generate(spec);

    // autocorrelation oracle along a column: strongest nonzero-lag peak at 9
    double best = -1e18;
    int best_lag = 0;
    for (int lag = 4; lag <= 14; ++lag) {
        double acc = 0.0;
        for (int x = 16; x < 112; x += 8)
            for (int y = 16; y + lag < 112; ++y)
                acc += (out.image.at(x, y) - 127.5) * (out.image.at(x, y + lag) - 127.5);
        if (acc > best) { best = acc; best_lag = lag; }
    }
    CHECK(best_lag == 9);
}

TEST_CASE("planted spirals set the frame winding count") {
    SynthSpec spec;
    spec.width = spec.height = 160;
    spec.field = FieldKind::constant(0.0);
    spec.planted.push_back({80.0, 80.0, 0.0, MinutiaKind::ending});
    const Template t = generate(spec).ground_truth;
    const PhaseImage spiral = spiral_phase(t, 160, 160);
    const OrientationField field{spiral.mask.grid, spiral.mask,
                                 std::vector<double>(spiral.mask.flags.size(), 0.0)};
    const PhaseImage cont = continuous_phase(field, spec.freq);
    const double circ = frame_circulation(
        [&](int x, int y) { return cont.at(x, y) + spiral.at(x, y); }, 160, 160, 2);
    CHECK(circ == doctest::Approx(2.0 * kPi).epsilon(1e-6));
}

TEST_CASE("generate rejects invalid specs") {
    SynthSpec spec;
    spec.width = spec.height = 100;
    SUBCASE("out of bounds") {
        spec.planted.push_back({150.0, 50.0, 0.0, MinutiaKind::ending});
        CHECK_THROWS_AS(generate(spec), InvalidSpec);
    }
    SUBCASE("closer than three ridge periods") {
        spec.planted.push_back({40.0, 50.0, 0.0, MinutiaKind::ending});
        spec.planted.push_back({50.0, 50.0, 0.0, MinutiaKind::ending});
        CHECK_THROWS_AS(generate(spec), InvalidSpec);
    }
}

TEST_CASE("random_spec enforces separation and frame margin") {
    const auto spec = random_spec(300, 300, FieldKind::arch(0.4, 200.0), 12, 5);
    CHECK(spec.planted.size() == 12);
    for (size_t i = 0; i < spec.planted.size(); ++i) {
        CHECK(spec.planted[i].x >= 40.0);
        CHECK(spec.planted[i].x <= 260.0);
        for (size_t j = i + 1; j < spec.planted.size(); ++j)
            CHECK(std::hypot(spec.planted[i].x - spec.planted[j].x,
                             spec.planted[i].y - spec.planted[j].y) >= 27.0);
    }
}

TEST_CASE("perturb") {
    const auto spec = random_spec(200, 200, FieldKind::constant(0.7), 8, 31);
    const auto data = generate(spec);

    SUBCASE("identity transform changes nothing meaningful") {
        const auto p = perturb(data.image, data.ground_truth, 0.0, 0.0, 0.0, 0.0, 1);
        REQUIRE(p.ground_truth.size() == data.ground_truth.size());
        for (size_t i = 0; i < p.ground_truth.size(); ++i) {
            CHECK(p.ground_truth.minutiae[i].x ==
                  doctest::Approx(data.ground_truth.minutiae[i].x).epsilon(1e-12));
            CHECK(p.ground_truth.minutiae[i].direction ==
                  doctest::Approx(data.ground_truth.minutiae[i].direction).epsilon(1e-12));
        }
        for (size_t i = 0; i < p.image.size(); ++i)
            CHECK(std::abs(static_cast<int>(p.image.pixels[i]) -
                           static_cast<int>(data.image.pixels[i])) <= 1);
    }
    SUBCASE("quarter rotation about the center maps points as expected") {
        Template t;
        t.width = t.height = 200;
        t.minutiae.push_back({110.0, 100.0, 0.0, MinutiaKind::ending}); // (cx+10, cy)
        const auto p = perturb(data.image, t, 0.0, 0.0, kPi / 2.0, 0.0, 1);
        REQUIRE(p.ground_truth.size() == 1);
        CHECK(std::hypot(p.ground_truth.minutiae[0].x - 100.0,
                         p.ground_truth.minutiae[0].y - 110.0) <= 0.5);
    }
    SUBCASE("dropout is seeded and deterministic") {
        const auto a = perturb(data.image, data.ground_truth, 0.0, 0.0, 0.0, 0.9, 17);
        const auto b = perturb(data.image, data.ground_truth, 0.0, 0.0, 0.0, 0.9, 17);
        REQUIRE(a.ground_truth.size() == b.ground_truth.size());
        CHECK(a.ground_truth.size() < data.ground_truth.size());
        for (size_t i = 0; i < a.ground_truth.size(); ++i)
            CHECK(a.ground_truth.minutiae[i].x == b.ground_truth.minutiae[i].x);
    }
    SUBCASE("out-of-frame minutiae are removed") {
        const auto p = perturb(data.image, data.ground_truth, 180.0, 0.0, 0.0, 0.0, 1);
        for (const Minutia& m : p.ground_truth.minutiae) {
            CHECK(m.x >= 0.0);
            CHECK(m.x < 200.0);
        }
    }
}

TEST_CASE("perturbed template still matches its source under rigid motion") {
    const auto spec = random_spec(300, 300, FieldKind::constant(0.2), 10, 51);
    const auto data = generate(spec);
    const auto p = perturb(data.image, data.ground_truth, 12.0, -7.0, kPi / 5.0, 0.0, 3);
    const MatchResult r = match(data.ground_truth, p.ground_truth);
    CHECK(decide(r, 0.25));
}

TEST_CASE("generated prints satisfy the reconstruction round-trip recovery rate") {
    const auto spec = random_spec(300, 300, FieldKind::constant(1.7), 8, 61);
    const auto data = generate(spec);
    const Template found = extract_minutiae(data.image, full_frame_mask(300, 300));
    int recovered = 0;
    for (const Minutia& m : data.ground_truth.minutiae)
        for (const Minutia& f : found.minutiae)
            if (std::hypot(m.x - f.x, m.y - f.y) <= 8.0) { ++recovered; break; }
    CHECK(recovered >= static_cast<int>(0.8 * data.ground_truth.size()));
}
