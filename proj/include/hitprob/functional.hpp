#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hitprob/goalset.hpp"
#include "hitprob/linsys.hpp"
#include "hitprob/mc.hpp"
#include "hitprob/noise.hpp"

namespace hitprob {

/// States this close to the goal boundary are counted inside (the sets are
/// closed) and tallied separately, which keeps the two estimator routes
/// comparable sample-by-sample.
inline constexpr double kBoundaryTol = 1e-9;

struct McConfig {
    std::int64_t samples = 100000;
    std::uint64_t seed = 0;
    bool antithetic = false;
};

struct ProbEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::int64_t boundary_hits = 0;
};

/// P(xhat0 + sum_i xi_i z_i in Q) by indicator Monte Carlo.
ProbEstimate evaluate_g_mc(const ZVectors& z, const Eigen::VectorXd& xhat0, const NoiseModel& noise,
                           const GoalSet& q, const McConfig& mc, mc::Exec exec = mc::Exec::OpenMP);

/// Same probability through the trajectory values: P(xhat0 + sum_i chi_i Psi_i y_i in Q).
ProbEstimate evaluate_G_mc(const std::vector<Eigen::VectorXd>& y,
                           const std::vector<Eigen::MatrixXd>& psi, const Eigen::VectorXd& xhat0,
                           const NoiseModel& noise, const GoalSet& q, const McConfig& mc,
                           mc::Exec exec = mc::Exec::OpenMP);

/// Closed form for gaussian noise and a halfspace goal.
double evaluate_gaussian_halfspace_exact(const ZVectors& z, const Eigen::VectorXd& xhat0,
                                         const NoiseModel& noise, const GoalSet& q);

/// Gradient of the closed form above with respect to z_k (0-based); zero in
/// the degenerate direction-free case.
Eigen::VectorXd gaussian_halfspace_exact_grad(const ZVectors& z, const Eigen::VectorXd& xhat0,
                                              const NoiseModel& noise, const GoalSet& q, int k);

/// Sample-by-sample comparison of the two estimator routes on a shared
/// sample stream.
struct GgComparison {
    ProbEstimate g;
    ProbEstimate G;
    std::int64_t samples = 0;
    std::int64_t disagreements = 0;
    /// Disagreeing samples whose state is not within kBoundaryTol of the
    /// goal boundary on either route; must stay zero.
    std::int64_t nonboundary_disagreements = 0;
};

GgComparison compare_g_G(const ZVectors& z, const std::vector<Eigen::VectorXd>& y,
                         const std::vector<Eigen::MatrixXd>& psi, const Eigen::VectorXd& xhat0,
                         const NoiseModel& noise, const GoalSet& q, const McConfig& mc,
                         mc::Exec exec = mc::Exec::OpenMP);

double standard_normal_cdf(double x);

namespace detail {

/// Draws sample `index` of the configured stream, reflecting odd indices
/// about the mean when antithetic pairing is on.
void draw_xi(const NoiseModel& noise, const McConfig& mc, const Eigen::VectorXd& mean2,
             std::int64_t index, Eigen::VectorXd& xi, Eigen::VectorXd& scratch);

void validate_mc(const NoiseModel& noise, const McConfig& mc);

mc::IndicatorSample classify_slack(double slack);

}  // namespace detail

}  // namespace hitprob
