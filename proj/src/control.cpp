#include "hitprob/control.hpp"

#include <algorithm>
#include <limits>

#include "hitprob/errors.hpp"

namespace hitprob {

ControlSet ControlSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size()) throw ValidationError("control_set.box: lo and hi sizes differ");
    if ((lo.array() > hi.array()).any()) throw ValidationError("control_set.box: lo > hi");
    ControlSet s;
    s.kind_ = Kind::Box;
    s.dim_ = static_cast<int>(lo.size());
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
}

ControlSet ControlSet::ball(int dim, double radius) {
    if (dim < 1) throw ValidationError("control_set.ball: dimension must be positive");
    if (!(radius > 0.0)) throw ValidationError("control_set.ball: radius must be > 0");
    ControlSet s;
    s.kind_ = Kind::Ball;
    s.dim_ = dim;
    s.radius_ = radius;
    return s;
}

ControlSet ControlSet::finite(std::vector<Eigen::VectorXd> points) {
    if (points.empty()) throw ValidationError("control_set.finite: empty point list");
    const auto dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw ValidationError("control_set.finite: inconsistent point dimensions");
    ControlSet s;
    s.kind_ = Kind::Finite;
    s.dim_ = static_cast<int>(dim);
    s.points_ = std::move(points);
    return s;
}

bool ControlSet::contains(const Eigen::VectorXd& v, double tol) const {
    if (v.size() != dim_) return false;
    switch (kind_) {
        case Kind::Box:
            return (v.array() >= lo_.array() - tol).all() && (v.array() <= hi_.array() + tol).all();
        case Kind::Ball:
            return v.norm() <= radius_ + tol;
        case Kind::Finite:
            for (const auto& p : points_)
                if ((v - p).norm() <= tol) return true;
            return false;
    }
    return false;
}

Eigen::VectorXd ControlSet::project(const Eigen::VectorXd& v) const {
    if (v.size() != dim_) throw ValidationError("control value: dimension mismatch with constraint set");
    switch (kind_) {
        case Kind::Box:
            return v.cwiseMax(lo_).cwiseMin(hi_);
        case Kind::Ball: {
            const double nrm = v.norm();
            if (nrm <= radius_) return v;
            return (radius_ / nrm) * v;
        }
        case Kind::Finite: {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < points_.size(); ++i) {
                const double d = (v - points_[i]).norm();
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            return points_[best];
        }
    }
    return v;
}

Control::Control(std::vector<double> grid, std::vector<Eigen::VectorXd> values, ControlSet constraint)
    : grid_(std::move(grid)), values_(std::move(values)), constraint_(std::move(constraint)) {
    if (grid_.size() < 2) throw ValidationError("control.grid: need at least {0, 1}");
    if (grid_.front() != 0.0 || grid_.back() != 1.0)
        throw ValidationError("control.grid: must start at 0 and end at 1");
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (!(grid_[i] > grid_[i - 1])) throw ValidationError("control.grid: not strictly increasing");
    if (values_.size() + 1 != grid_.size())
        throw ValidationError("control.values: need one value per interval (grid size - 1)");
    for (auto& v : values_) {
        if (v.size() != constraint_.dimension())
            throw ValidationError("control.values: dimension mismatch with constraint set");
        v = constraint_.project(v);
    }
}

std::size_t Control::interval_at(double t) const {
    if (t >= grid_[grid_.size() - 2]) return values_.size() - 1;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
    return hi == 0 ? 0 : hi - 1;
}

const Eigen::VectorXd& Control::at(double t) const { return values_[interval_at(t)]; }

Control Control::zero(std::vector<double> grid, const ControlSet& constraint) {
    std::vector<Eigen::VectorXd> values(grid.size() - 1,
                                        Eigen::VectorXd::Zero(constraint.dimension()));
    return Control(std::move(grid), std::move(values), constraint);
}

}  // namespace hitprob
