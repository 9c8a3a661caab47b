// Compares the OpenMP layer kernels against the serial reference on the
// default architecture's geometries: wall time, throughput, and elementwise
// agreement. Run with --quick for a fast smoke pass (used by ctest).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "csvm/layers.hpp"
#include "csvm/reference.hpp"
#include "csvm/rng.hpp"

using namespace csvm;

namespace {

Tensor3 random_tensor(int h, int w, int c, std::uint64_t seed) {
    Tensor3 t(h, w, c);
    rng::SplitMix64 g(seed);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t.data()[i] = static_cast<float>(g.next_in(-1.0, 1.0));
    }
    return t;
}

FilterBank random_bank(int n, int k, int c, int stride, std::uint64_t seed) {
    FilterBank bank(n, k, c, stride);
    rng::SplitMix64 g(seed);
    for (auto& w : bank.weights) {
        w = static_cast<float>(g.next_in(-1.0, 1.0));
    }
    return bank;
}

double time_of(const std::function<Tensor3()>& fn, int reps, Tensor3& out) {
    out = fn();  // warm-up, also the result used for checking
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        Tensor3 t = fn();
        if (t.size() == 0) std::abort();
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    return dt.count() / reps;
}

double max_abs_diff(const Tensor3& a, const Tensor3& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
    }
    return m;
}

struct Case {
    std::string name;
    std::function<Tensor3()> parallel;
    std::function<Tensor3()> serial;
    double flops;  // per invocation, multiply-adds counted as 2
};

int run(int reps) {
    const Tensor3 in1 = random_tensor(128, 128, 1, 11);
    const FilterBank bank1 = random_bank(40, 7, 1, 2, 12);
    const Tensor3 in2 = random_tensor(30, 30, 40, 13);
    const FilterBank bank2 = random_bank(128, 3, 40, 1, 14);
    const Tensor3 pool_in = random_tensor(61, 61, 40, 15);
    const PoolSpec pool_spec{3, 2, PoolMode::Max};

    const Case cases[] = {
        {"conv 128x128x1 * 40x7x7 s2",
         [&] { return conv2d(in1, bank1, 0); },
         [&] { return ref::conv2d(in1, bank1, 0); },
         2.0 * 61 * 61 * 40 * 7 * 7 * 1},
        {"conv 30x30x40 * 128x3x3 s1",
         [&] { return conv2d(in2, bank2, 0); },
         [&] { return ref::conv2d(in2, bank2, 0); },
         2.0 * 28 * 28 * 128 * 3 * 3 * 40},
        {"maxpool 61x61x40 w3 s2",
         [&] { return pool(pool_in, pool_spec); },
         [&] { return ref::pool(pool_in, pool_spec); },
         1.0 * 30 * 30 * 40 * 9},
    };

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%-30s %12s %12s %9s %12s\n", "kernel", "serial ms", "parallel ms", "speedup",
                "max |diff|");

    bool ok = true;
    for (const auto& c : cases) {
        Tensor3 out_par, out_ser;
        const double t_par = time_of(c.parallel, reps, out_par);
        const double t_ser = time_of(c.serial, reps, out_ser);
        const double diff = max_abs_diff(out_par, out_ser);
        std::printf("%-30s %12.3f %12.3f %8.2fx %12.3g (%.1f GFLOP/s)\n", c.name.c_str(),
                    t_ser * 1e3, t_par * 1e3, t_ser / t_par, diff, c.flops / t_par * 1e-9);
        if (diff > 1e-4) {
            std::printf("  MISMATCH: kernels disagree beyond tolerance\n");
            ok = false;
        }
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    int reps = 20;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) reps = 2;
        if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc) reps = std::atoi(argv[++i]);
    }
    return run(reps);
}
