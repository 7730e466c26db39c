#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hitprob/functional.hpp"
#include "hitprob/goalset.hpp"
#include "hitprob/linsys.hpp"
#include "hitprob/noise.hpp"

namespace hitprob {

struct GradEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

/// Dual vectors e^i with <e^i, z_j> = delta_ij for a basis {z_1..z_n}.
struct DualBasis {
    std::vector<Eigen::VectorXd> e;
    double gram_condition = 0.0;
};

/// Score-function estimate of the derivative of h_k at z_k in the direction
/// z_j: minus the expectation over the pulled-back region O(Z) of
/// (delta_kj + r_k * dlogf/dr_j). Indices are 0-based.
GradEstimate directional_derivative_mc(int k, int j, const ZVectors& z, const Eigen::VectorXd& xhat0,
                                       const NoiseModel& noise, const GoalSet& q, const McConfig& mc,
                                       mc::Exec exec = mc::Exec::OpenMP);

/// Central-difference check of the same derivative with common random
/// numbers on both sides.
GradEstimate finite_difference_directional(int k, int j, const ZVectors& z,
                                           const Eigen::VectorXd& xhat0, const NoiseModel& noise,
                                           const GoalSet& q, const McConfig& mc, double step,
                                           mc::Exec exec = mc::Exec::OpenMP);

/// Solves Z^T E = I by pivoted factorization. Throws NotABasisError when the
/// vectors are singular or the condition estimate exceeds 1e12.
DualBasis dual_basis(const std::vector<Eigen::VectorXd>& z_basis);

/// Greedy pivoted-volume choice of n basis columns among the z-vectors.
std::vector<int> select_basis_indices(const ZVectors& z, int n);

struct GradientResult {
    Eigen::VectorXd grad;
    Eigen::VectorXd std_error;
    std::vector<int> basis_indices;
    double gram_condition = 0.0;
    std::vector<GradEstimate> directional;  // one per basis direction
};

/// Full gradient of h_k at z_k assembled from directional derivatives over a
/// dual basis. Empty basis_indices selects the basis automatically.
GradientResult gradient_hk(int k, const ZVectors& z, std::vector<int> basis_indices,
                           const Eigen::VectorXd& xhat0, const NoiseModel& noise, const GoalSet& q,
                           const McConfig& mc, mc::Exec exec = mc::Exec::OpenMP);

/// One-sided difference quotients of h at a probe point.
struct OneSidedQuotients {
    double forward = 0.0;
    double forward_se = 0.0;
    double backward = 0.0;
    double backward_se = 0.0;
    double step = 0.0;

    double gap() const { return backward - forward; }
    double combined_se() const;
};

struct NonsmoothExampleReport {
    int example = 0;
    // Jump probe (example 1).
    double h_at_z = 0.0;
    double h_at_z_se = 0.0;
    std::vector<double> perturbations;
    std::vector<double> h_perturbed;
    bool downward_jump = false;
    // Kink probe (examples 2, 3).
    OneSidedQuotients quotients;
    bool one_sided_mismatch = false;
    // Pulled-back region scan along the probe ray (examples 2, 3).
    double region_lo = 0.0;
    double region_hi = 0.0;
};

/// Reproduces the three nonsmooth geometries: a disc inside a hyperplane
/// (h jumps down under perturbation), a first-quadrant annulus and a lens
/// of two discs (one-sided difference quotients disagree).
NonsmoothExampleReport nonsmoothness_suite(int example, const McConfig& mc,
                                           mc::Exec exec = mc::Exec::OpenMP);

}  // namespace hitprob
