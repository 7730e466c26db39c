#pragma once

#include <vector>

#include "hitprob/control.hpp"
#include "hitprob/functional.hpp"
#include "hitprob/goalset.hpp"
#include "hitprob/grid.hpp"
#include "hitprob/linsys.hpp"
#include "hitprob/noise.hpp"

namespace hitprob {

/// Validated problem description before grid construction.
struct ProblemConfig {
    LinearSystem system;
    NoiseModel noise;
    GoalSet goal;
    ControlSet vset;
    int steps_per_interval = 64;
    std::vector<double> control_grid;  // empty: controls live on the switch intervals
};

/// A compiled problem: every cross-field invariant checked, the integration
/// grid fixed, and the fundamental solution precomputed. Immutable and safe
/// to share between threads.
struct ProblemInstance {
    LinearSystem system;
    NoiseModel noise;
    GoalSet goal;
    ControlSet vset;
    int steps_per_interval = 64;
    std::vector<double> control_grid;
    TimeGrid grid;
    FundamentalSolution fund;

    int n() const { return system.n; }
    int m() const { return system.m; }
    int N() const { return system.num_intervals(); }
};

/// Compiles a config. extra_breaks lets a caller merge the breakpoints of a
/// control file into the grid so piecewise-constant controls integrate
/// exactly.
ProblemInstance compile(const ProblemConfig& config, const std::vector<double>& extra_breaks = {});

/// z-vectors of a control under this instance.
ZVectors problem_z_vectors(const ProblemInstance& problem, const Control& control);

/// The goal functional: z-vector reduction followed by the indicator
/// Monte Carlo estimate.
ProbEstimate phi(const ProblemInstance& problem, const Control& control, const McConfig& mc,
                 mc::Exec exec = mc::Exec::OpenMP);

/// Zero control on the instance's control grid, projected into V.
Control default_control(const ProblemInstance& problem);

}  // namespace hitprob
