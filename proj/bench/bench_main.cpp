#include <chrono>
#include <cmath>
#include <cstdio>

#include "fluxlim/harness.hpp"
#include "fluxlim/subsolution.hpp"

using namespace fluxlim;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main() {
    ModelParams mp;
    mp.chi = 60.0 * std::pow(3.0, 1.6);
    const auto dp = derive(mp, 1.2);

    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial ms", "openmp ms", "speedup");

    {
        CertReport a, b;
        const double ts = time_ms([&] { a = certify_reference(dp, 10000, 5, 1e-9); }, 3);
        const double tp = time_ms([&] { b = certify(dp, 10000, 5, 1e-9); }, 3);
        std::printf("%-28s %10.2f %10.2f %8.2f  (agree: %s)\n", "certify 10^4 x 5", ts, tp,
                    ts / tp,
                    a.worst_L1 == b.worst_L1 && a.worst_L2 == b.worst_L2 ? "yes" : "NO");
    }
    {
        const auto grid = build_grid(512, 1.0);
        const std::vector<double> deltas{0.25, 0.5, 1.5, 2.0};
        HardyBatchResult a, b;
        const double ts =
            time_ms([&] { a = hardy_batch_reference(grid, deltas, 500, 42); }, 3);
        const double tp = time_ms([&] { b = hardy_batch(grid, deltas, 500, 42); }, 3);
        std::printf("%-28s %10.2f %10.2f %8.2f  (agree: %s)\n", "hardy batch 4 x 500", ts,
                    tp, ts / tp,
                    a.passes == b.passes && a.rejected == b.rejected ? "yes" : "NO");
    }
    return 0;
}
