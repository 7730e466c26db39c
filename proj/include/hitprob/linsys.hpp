#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hitprob/control.hpp"
#include "hitprob/grid.hpp"
#include "hitprob/matrix_function.hpp"

namespace hitprob {

/// dx/dt = A(t) x + xi(t) B(t) u(t) + f(t) on [0,1], x(0) = x0, with xi
/// piecewise constant on the switch intervals.
struct LinearSystem {
    int n = 0;
    int m = 0;
    MatrixFunction A;
    MatrixFunction B;
    MatrixFunction f;
    Eigen::VectorXd x0;
    std::vector<double> switch_times;  // 0 = t_0 < t_1 < ... < t_N = 1

    int num_intervals() const { return static_cast<int>(switch_times.size()) - 1; }
    void validate() const;
};

/// Fundamental matrix of dPhi/dt = A(t) Phi, Phi(0) = I, sampled on a grid,
/// plus the terminal-time propagators Psi_i = Phi(1) Phi(t_i)^{-1} and the
/// control-free terminal state xhat0.
struct FundamentalSolution {
    std::vector<Eigen::MatrixXd> phi;  // one per grid node
    std::vector<Eigen::MatrixXd> psi;  // psi[i-1] = Psi_i, i = 1..N; Psi_N = I
    Eigen::MatrixXd phi_at_1;
    Eigen::VectorXd xhat0;
};

/// Per-interval control influence vectors: the terminal state is
/// xhat0 + sum_i xi_i z[i].
struct ZVectors {
    std::vector<Eigen::VectorXd> z;

    std::size_t size() const { return z.size(); }
    int dim() const { return z.empty() ? 0 : static_cast<int>(z.front().size()); }
    /// Stacks the vectors as columns of an n x N matrix.
    Eigen::MatrixXd as_matrix() const;
    double max_norm() const;
};

/// Integrates the fundamental matrix with one classical RK4 step per grid
/// step, computes each Psi_i by a pivoted linear solve against Phi(t_i),
/// and accumulates the drift integral by composite Simpson on the grid.
FundamentalSolution solve_fundamental(const LinearSystem& system, const TimeGrid& grid);

/// Integrates dy/dt = A(t) y + B(t) u(t), y(0) = 0 with the same RK4 scheme;
/// returns y at the switch nodes t_1..t_N.
std::vector<Eigen::VectorXd> propagate_y(const LinearSystem& system, const Control& control,
                                         const TimeGrid& grid);

/// Quadrature of Phi(1) Phi^{-1}(s) B(s) u(s) over each switch interval.
ZVectors compute_z_vectors(const FundamentalSolution& fund, const LinearSystem& system,
                           const Control& control, const TimeGrid& grid);

/// xhat0 + sum_i xi_i z_i.
Eigen::VectorXd terminal_state(const FundamentalSolution& fund, const ZVectors& z,
                               const Eigen::VectorXd& xi);

}  // namespace hitprob
