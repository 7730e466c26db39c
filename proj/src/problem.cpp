#include "hitprob/problem.hpp"

#include <algorithm>
#include <string>

#include "hitprob/errors.hpp"

namespace hitprob {

ProblemInstance compile(const ProblemConfig& config, const std::vector<double>& extra_breaks) {
    config.system.validate();
    if (config.noise.dimension() != config.system.num_intervals())
        throw ValidationError("noise: dimension " + std::to_string(config.noise.dimension()) +
                              " differs from the switch-interval count " +
                              std::to_string(config.system.num_intervals()));
    if (config.goal.dimension() != config.system.n)
        throw ValidationError("goal: dimension " + std::to_string(config.goal.dimension()) +
                              " differs from system.n = " + std::to_string(config.system.n));
    if (config.vset.dimension() != config.system.m)
        throw ValidationError("control_set: dimension " + std::to_string(config.vset.dimension()) +
                              " differs from system.m = " + std::to_string(config.system.m));

    ProblemInstance p{config.system, config.noise,  config.goal, config.vset,
                      config.steps_per_interval,    {},          {},          {}};
    p.control_grid = config.control_grid.empty() ? config.system.switch_times : config.control_grid;
    if (p.control_grid.front() != 0.0 || p.control_grid.back() != 1.0)
        throw ValidationError("control_grid: must run from 0 to 1");

    std::vector<double> breaks = p.control_grid;
    breaks.insert(breaks.end(), extra_breaks.begin(), extra_breaks.end());
    p.grid = TimeGrid::build(config.system.switch_times, breaks, config.steps_per_interval);
    p.fund = solve_fundamental(p.system, p.grid);

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p.system.n, p.system.n);
    if ((p.fund.psi.back() - eye).cwiseAbs().maxCoeff() > 1e-10)
        throw NumericalError("Psi_N deviates from identity (fundamental solve inconsistent)");
    return p;
}

ZVectors problem_z_vectors(const ProblemInstance& problem, const Control& control) {
    return compute_z_vectors(problem.fund, problem.system, control, problem.grid);
}

ProbEstimate phi(const ProblemInstance& problem, const Control& control, const McConfig& mc,
                 mc::Exec exec) {
    const ZVectors z = problem_z_vectors(problem, control);
    return evaluate_g_mc(z, problem.fund.xhat0, problem.noise, problem.goal, mc, exec);
}

Control default_control(const ProblemInstance& problem) {
    return Control::zero(problem.control_grid, problem.vset);
}

}  // namespace hitprob
