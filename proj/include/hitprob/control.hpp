#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hitprob {

/// Admissible control value set V in R^m.
class ControlSet {
public:
    enum class Kind { Box, Ball, Finite };

    static ControlSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    static ControlSet ball(int dim, double radius);
    static ControlSet finite(std::vector<Eigen::VectorXd> points);

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    bool contains(const Eigen::VectorXd& v, double tol = 0.0) const;
    /// Nearest point of V (Euclidean); finite sets break ties at the lowest index.
    Eigen::VectorXd project(const Eigen::VectorXd& v) const;

    const Eigen::VectorXd& lo() const { return lo_; }
    const Eigen::VectorXd& hi() const { return hi_; }
    double radius() const { return radius_; }
    const std::vector<Eigen::VectorXd>& points() const { return points_; }

private:
    Kind kind_ = Kind::Box;
    int dim_ = 0;
    Eigen::VectorXd lo_, hi_;
    double radius_ = 0.0;
    std::vector<Eigen::VectorXd> points_;
};

/// Piecewise-constant deterministic control on [0,1]. Values live on the
/// half-open intervals [grid[k], grid[k+1]) and are projected into the
/// constraint set at construction.
class Control {
public:
    Control(std::vector<double> grid, std::vector<Eigen::VectorXd> values, ControlSet constraint);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<Eigen::VectorXd>& values() const { return values_; }
    const ControlSet& constraint() const { return constraint_; }

    std::size_t num_intervals() const { return values_.size(); }
    int dimension() const { return constraint_.dimension(); }

    /// Value on the interval holding t; t = 1 maps to the last interval.
    const Eigen::VectorXd& at(double t) const;
    std::size_t interval_at(double t) const;

    /// The zero control (projected into V) on the given breakpoints.
    static Control zero(std::vector<double> grid, const ControlSet& constraint);

private:
    std::vector<double> grid_;
    std::vector<Eigen::VectorXd> values_;
    ControlSet constraint_;
};

}  // namespace hitprob
