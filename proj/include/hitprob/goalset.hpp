#pragma once

#include <Eigen/Dense>

#include "hitprob/linsys.hpp"

namespace hitprob {

/// Terminal goal set Q, a closed set in R^n from a fixed menu of analytic
/// geometries. Each kind exposes a boundary slack: positive inside,
/// negative outside, zero on the boundary, scaled so that |slack| is
/// comparable to the Euclidean distance to the boundary.
class GoalSet {
public:
    enum class Kind { Halfspace, Ball, Box, DiscInHyperplane, AnnulusSector, Lens };

    /// <a, x> <= b.
    static GoalSet halfspace(Eigen::VectorXd a, double b);
    static GoalSet ball(Eigen::VectorXd center, double radius);
    static GoalSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    /// {x_fc = value} intersected with a disc of the given radius around
    /// `center` in the remaining coordinates (fixed_coord is 0-based;
    /// center's fixed coordinate is ignored).
    static GoalSet disc_in_hyperplane(int fixed_coord, double fixed_value, Eigen::VectorXd center,
                                      double radius);
    /// First-quadrant annulus r_lo <= |x| <= r_hi in R^2.
    static GoalSet annulus_sector(double r_lo, double r_hi);
    /// Intersection of two balls of equal radius.
    static GoalSet lens(Eigen::VectorXd c1, Eigen::VectorXd c2, double radius);

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }

    double boundary_slack(const Eigen::VectorXd& x) const;
    bool contains(const Eigen::VectorXd& x) const { return boundary_slack(x) >= 0.0; }

    const Eigen::VectorXd& a() const { return a_; }
    double b() const { return b_; }

private:
    Kind kind_ = Kind::Ball;
    int dim_ = 0;
    Eigen::VectorXd a_, c2_;   // direction/center/lo ; second center/hi
    double b_ = 0.0;           // offset/radius/r_lo
    double r2_ = 0.0;          // r_hi
    int fixed_coord_ = 0;
    double fixed_value_ = 0.0;
};

bool shifted_contains(const GoalSet& q, const Eigen::VectorXd& xhat0, const Eigen::VectorXd& s);

/// Membership of the noise realization r in the pulled-back region
/// O(Z) = { r : xhat0 + sum_i r_i z_i in Q }.
bool oz_contains(const GoalSet& q, const Eigen::VectorXd& xhat0, const ZVectors& z,
                 const Eigen::VectorXd& r);

}  // namespace hitprob
