// Times the OpenMP kernels against their serial reference implementations
// on a synthetic workload and prints one line per kernel.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fpr/matching.hpp"
#include "fpr/orientation.hpp"
#include "fpr/phase.hpp"
#include "fpr/synth.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn(); // warm-up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s serial %8.2f ms   parallel %8.2f ms   speedup %.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns are serial\n");
#endif

    const int size = 1024;
    const auto spec = fpr::random_spec(size, size, fpr::FieldKind::arch(0.4, 400.0), 48, 7);
    const auto data = fpr::generate(spec);
    const fpr::Template& t = data.ground_truth;
    const fpr::ForegroundMask mask = fpr::full_frame_mask(size, size);

    report("spiral_phase",
           time_ms([&] { fpr::serial::spiral_phase(t, size, size); }, 3),
           time_ms([&] { fpr::spiral_phase(t, size, size); }, 3));

    report("field_from_minutiae",
           time_ms([&] { fpr::serial::field_from_minutiae(t, mask); }, 10),
           time_ms([&] { fpr::field_from_minutiae(t, mask); }, 10));

    report("field_from_image",
           time_ms([&] { fpr::serial::field_from_image(data.image, mask); }, 10),
           time_ms([&] { fpr::field_from_image(data.image, mask); }, 10));

    const fpr::OrientationField field = fpr::field_from_minutiae(t, mask);
    const fpr::PhaseImage cont = fpr::continuous_phase(field, spec.freq);
    const fpr::PhaseImage spiral = fpr::spiral_phase(t, size, size);
    report("compose_and_render",
           time_ms([&] { fpr::serial::compose_and_render(cont, spiral); }, 10),
           time_ms([&] { fpr::compose_and_render(cont, spiral); }, 10));

    const auto perturbed = fpr::perturb(data.image, t, 8.0, -5.0, 0.2, 0.1, 11);
    report("match",
           time_ms([&] { fpr::serial::match(t, perturbed.ground_truth); }, 3),
           time_ms([&] { fpr::match(t, perturbed.ground_truth); }, 3));

    return 0;
}
