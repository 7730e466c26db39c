#pragma once

// Independent reference computations for the test suites. Nothing here may
// call the code paths it is used to check: the matrix exponential is Taylor
// series with scaling and squaring, trajectories are integrated from the
// raw system definition, probabilities come from quadrature.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hitprob/control.hpp"
#include "hitprob/grid.hpp"
#include "hitprob/linsys.hpp"
#include "hitprob/noise.hpp"
#include "hitprob/problem.hpp"

namespace oracles {

/// exp(M) by scaling-and-squaring with a Taylor series on the scaled block.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

double normal_pdf(double x);
double normal_cdf(double x);

/// Probability that a standard bivariate normal lands in the disc of the
/// given radius around (cx, cy); polar Simpson quadrature.
double bivariate_normal_disc_probability(double cx, double cy, double radius);

/// RK4 integration of the full noisy system with a frozen noise realization,
/// straight from the raw coefficients (no Cauchy formula, no z-vectors).
/// Stage data is tabulated once so per-realization runs stay cheap.
class DirectSimulator {
public:
    DirectSimulator(const hitprob::LinearSystem& system, const hitprob::Control& control,
                    const hitprob::TimeGrid& grid);

    Eigen::VectorXd terminal_state(const Eigen::VectorXd& xi) const;

private:
    struct Step {
        double h;
        Eigen::MatrixXd A0, Am, A1;
        Eigen::VectorXd bu0, bum, bu1;  // B(t) u(t) at the stage times
        Eigen::VectorXd f0, fm, f1;
        std::size_t noise_interval;
    };
    Eigen::VectorXd x0_;
    std::vector<Step> steps_;
};

/// Small deterministic generator for reproducible random test instances;
/// unrelated to the library's sample streams.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}
    std::uint64_t next_u64();
    double uniform(double lo, double hi);
    double normal();

private:
    std::uint64_t state_;
};

/// A random well-behaved problem instance: n <= 4, N <= 3, gaussian noise,
/// smooth goal geometry, piecewise-constant control.
struct RandomInstance {
    hitprob::ProblemConfig config;
    hitprob::Control control;
};

RandomInstance make_random_instance(std::uint64_t seed, int steps_per_interval = 64);

}  // namespace oracles
