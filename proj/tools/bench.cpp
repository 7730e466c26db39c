// Times the serial reference kernels against the OpenMP ones and verifies
// they produce identical results while doing so.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Dense>

#include "hitprob/functional.hpp"
#include "hitprob/gradient.hpp"
#include "hitprob/linsys.hpp"
#include "hitprob/noise.hpp"

using namespace hitprob;

namespace {

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b) {
    return std::chrono::duration<double>(b - a).count();
}

struct BenchCase {
    ZVectors z;
    Eigen::VectorXd xhat0;
    NoiseModel noise;
    GoalSet goal;
};

BenchCase make_case() {
    ZVectors z;
    z.z = {Eigen::Vector2d(1.0, 0.3), Eigen::Vector2d(0.2, 1.0), Eigen::Vector2d(-0.4, 0.5)};
    Eigen::Matrix3d cov;
    cov << 1.0, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 1.0;
    return {z, Eigen::Vector2d(0.1, -0.2),
            NoiseModel::gaussian(Eigen::Vector3d(0.1, -0.2, 0.3), cov),
            GoalSet::ball(Eigen::Vector2d(0.8, 0.6), 1.4)};
}

template <class F>
void run(const char* name, std::int64_t samples, F&& call) {
    const auto t0 = std::chrono::steady_clock::now();
    const double serial = call(mc::Exec::Serial);
    const auto t1 = std::chrono::steady_clock::now();
    const double parallel = call(mc::Exec::OpenMP);
    const auto t2 = std::chrono::steady_clock::now();

    const double ts = seconds(t0, t1);
    const double tp = seconds(t1, t2);
    std::printf("%-22s %10lld  %9.3fs  %9.3fs  %6.2fx  %s\n", name,
                static_cast<long long>(samples), ts, tp, ts / tp,
                serial == parallel ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    std::int64_t samples = 4000000;
    if (argc > 1) samples = std::atoll(argv[1]);
    const auto c = make_case();

    std::printf("threads: %d, samples per kernel: %lld\n", omp_get_max_threads(),
                static_cast<long long>(samples));
    std::printf("%-22s %10s  %10s  %10s  %7s\n", "kernel", "samples", "serial", "openmp", "speedup");

    McConfig mc{samples, 42, false};
    run("evaluate_g", samples, [&](mc::Exec e) {
        return evaluate_g_mc(c.z, c.xhat0, c.noise, c.goal, mc, e).value;
    });
    run("directional_score", samples, [&](mc::Exec e) {
        return directional_derivative_mc(0, 1, c.z, c.xhat0, c.noise, c.goal, mc, e).value;
    });
    run("finite_difference", samples, [&](mc::Exec e) {
        return finite_difference_directional(0, 1, c.z, c.xhat0, c.noise, c.goal, mc, 1e-2, e).value;
    });
    return 0;
}
