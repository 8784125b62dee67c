#ifndef FPR_SYNTH_HPP
#define FPR_SYNTH_HPP

#include <cstdint>
#include <utility>

#include "fpr/image.hpp"
#include "fpr/minutiae.hpp"
#include "fpr/phase.hpp"

namespace fpr {

struct FieldKind {
    enum class Tag { constant, arch } tag = Tag::constant;
    double theta = 0.0;      // constant
    double amplitude = 0.0;  // arch: theta(x) = amplitude * sin(2*pi*x / wavelength)
    double wavelength = 1.0;

    static FieldKind constant(double theta) { return {Tag::constant, theta, 0.0, 1.0}; }
    static FieldKind arch(double amplitude, double wavelength) {
        return {Tag::arch, 0.0, amplitude, wavelength};
    }
};

struct SynthSpec {
    int width = 300;
    int height = 300;
    FieldKind field;
    std::vector<Minutia> planted;
    std::uint64_t seed = 0;
    FrequencyMap freq;
};

struct SynthOutput {
    GrayImage image;
    Template ground_truth;
};

// Renders the analytic orientation field plus planted spirals over a
// full-frame mask. Deterministic; rejects specs whose planted minutiae
// are out of bounds or closer than three ridge periods.
SynthOutput generate(const SynthSpec& spec);

// Plants `count` random minutiae (rejection-sampled for separation and a
// frame margin) into the spec, deterministically in spec.seed.
SynthSpec random_spec(int width, int height, FieldKind field, int count, std::uint64_t seed,
                      FrequencyMap freq = {}, double edge_margin = 40.0);

// Rigid transform (rotation about the frame center, then translation) with
// bilinear resampling; out-of-frame pixels become 255. Each minutia is
// independently dropped with probability `dropout` (seeded); transformed
// minutiae that leave the frame are removed.
SynthOutput perturb(const GrayImage& image, const Template& t, double dx, double dy, double rot,
                    double dropout, std::uint64_t seed);

// Deterministic cross-platform RNG used by synth (splitmix64 stream).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double next_unit(); // uniform in [0, 1)
    double next_in(double lo, double hi);

private:
    std::uint64_t state_;
};

} // namespace fpr

#endif
