#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hitprob/control.hpp"
#include "hitprob/functional.hpp"
#include "hitprob/gradient.hpp"
#include "hitprob/problem.hpp"

namespace hitprob {

/// Backward solutions theta_k of d theta/dt = -A(t)^T theta with terminal
/// conditions grad h_k, and their piecewise assembly: on [t_{k-1}, t_k) the
/// conjugate function equals theta_k (the final node belongs to the last
/// interval).
struct AdjointTrajectory {
    std::vector<std::vector<Eigen::VectorXd>> theta;  // [k][node]
    std::vector<Eigen::VectorXd> terminal_grads;
    std::vector<Eigen::VectorXd> assembled;           // per node
};

AdjointTrajectory adjoint_solve(const LinearSystem& system, const TimeGrid& grid,
                                const std::vector<Eigen::VectorXd>& terminal_grads);

/// Closed-form maximizer of <theta, B v> over V. Ties at zero components
/// break to the box midpoint, the ball center, or the lowest finite index.
Eigen::VectorXd hamiltonian_argmax(const Eigen::VectorXd& theta, const Eigen::MatrixXd& Bt,
                                   const ControlSet& vset);

struct IntervalGap {
    double t_mid = 0.0;
    double gap = 0.0;                // max_v <theta,Bv> - <theta,Bu> at the midpoint
    Eigen::VectorXd argmax_value;
};

struct PmpReport {
    double residual = 0.0;           // integral of the pointwise gap
    std::vector<IntervalGap> gaps;   // one per control interval
    std::vector<Eigen::VectorXd> terminal_grads;
    std::vector<Eigen::VectorXd> terminal_grad_se;
    std::optional<Control> argmax_control;
};

/// Hamiltonian-gap report for a control: terminal gradients by the
/// score-function estimator, adjoint solve, then per-interval gaps at
/// control-interval midpoints integrated by the midpoint rule.
PmpReport pmp_residual(const ProblemInstance& problem, const Control& control, const McConfig& mc,
                       mc::Exec exec = mc::Exec::OpenMP);

enum class Degeneracy { TrivialOptimal, TrivialSuboptimalCertificate, Nontrivial };

std::string to_string(Degeneracy d);

/// Trivial z-set dichotomy: all-zero z-vectors make the functional constant
/// at 1 (xhat0 in Q, globally optimal) or 0 (certificate of suboptimality
/// for non-degenerate problems).
Degeneracy check_degeneracy(const ZVectors& z, const Eigen::VectorXd& xhat0, const GoalSet& q);

struct McSchedule {
    std::int64_t initial_samples = 100000;
    double growth = 2.0;
    std::int64_t max_samples = 1000000;

    std::int64_t at(int iteration) const;
};

struct OptimizeIteration {
    int iteration = 0;
    std::int64_t samples = 0;
    double phi_before = 0.0;
    double phi_after = 0.0;
    double std_error = 0.0;
    double residual = 0.0;
    double alpha = 0.0;       // 0 when no step was accepted
};

enum class OptimizeStatus { Converged, NoImprovement, IterationLimit, RegularityFailure };

std::string to_string(OptimizeStatus s);

struct OptimizeResult {
    Control control;
    std::vector<OptimizeIteration> trace;
    OptimizeStatus status = OptimizeStatus::IterationLimit;
    int accepted_steps = 0;
    std::string note;
};

/// Conditional-gradient ascent on the hitting probability: the Hamiltonian
/// argmax supplies the ascent vertex, a halving line search accepts the
/// largest step that improves the common-random-number estimate. Fixed
/// points satisfy the pointwise maximum condition. A trivial z-set at the
/// start is escaped by probing extreme constant controls.
OptimizeResult optimize(const ProblemInstance& problem, const Control& init, int iters,
                        const McSchedule& schedule, std::uint64_t seed, double residual_tol = 0.0,
                        mc::Exec exec = mc::Exec::OpenMP);

}  // namespace hitprob
