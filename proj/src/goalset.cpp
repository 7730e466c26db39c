#include "hitprob/goalset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hitprob/errors.hpp"

namespace hitprob {

GoalSet GoalSet::halfspace(Eigen::VectorXd a, double b) {
    if (a.size() < 1 || a.norm() == 0.0) throw ValidationError("goal.halfspace: a must be nonzero");
    GoalSet q;
    q.kind_ = Kind::Halfspace;
    q.dim_ = static_cast<int>(a.size());
    q.a_ = std::move(a);
    q.b_ = b;
    return q;
}

GoalSet GoalSet::ball(Eigen::VectorXd center, double radius) {
    if (!(radius > 0.0)) throw ValidationError("goal.ball: radius must be > 0");
    GoalSet q;
    q.kind_ = Kind::Ball;
    q.dim_ = static_cast<int>(center.size());
    q.a_ = std::move(center);
    q.b_ = radius;
    return q;
}

GoalSet GoalSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size()) throw ValidationError("goal.box: lo and hi sizes differ");
    if ((lo.array() > hi.array()).any()) throw ValidationError("goal.box: lo > hi");
    GoalSet q;
    q.kind_ = Kind::Box;
    q.dim_ = static_cast<int>(lo.size());
    q.a_ = std::move(lo);
    q.c2_ = std::move(hi);
    return q;
}

GoalSet GoalSet::disc_in_hyperplane(int fixed_coord, double fixed_value, Eigen::VectorXd center,
                                    double radius) {
    if (!(radius > 0.0)) throw ValidationError("goal.disc_in_hyperplane: radius must be > 0");
    if (fixed_coord < 0 || fixed_coord >= center.size())
        throw ValidationError("goal.disc_in_hyperplane: fixed_coord out of range");
    GoalSet q;
    q.kind_ = Kind::DiscInHyperplane;
    q.dim_ = static_cast<int>(center.size());
    q.a_ = std::move(center);
    q.b_ = radius;
    q.fixed_coord_ = fixed_coord;
    q.fixed_value_ = fixed_value;
    return q;
}

GoalSet GoalSet::annulus_sector(double r_lo, double r_hi) {
    if (!(0.0 < r_lo && r_lo < r_hi)) throw ValidationError("goal.annulus_sector: need 0 < r_lo < r_hi");
    GoalSet q;
    q.kind_ = Kind::AnnulusSector;
    q.dim_ = 2;
    q.b_ = r_lo;
    q.r2_ = r_hi;
    return q;
}

GoalSet GoalSet::lens(Eigen::VectorXd c1, Eigen::VectorXd c2, double radius) {
    if (c1.size() != c2.size()) throw ValidationError("goal.lens: center sizes differ");
    if (!(radius > 0.0)) throw ValidationError("goal.lens: radius must be > 0");
    if ((c1 - c2).norm() >= 2.0 * radius)
        throw ValidationError("goal.lens: balls do not intersect");
    GoalSet q;
    q.kind_ = Kind::Lens;
    q.dim_ = static_cast<int>(c1.size());
    q.a_ = std::move(c1);
    q.c2_ = std::move(c2);
    q.b_ = radius;
    return q;
}

double GoalSet::boundary_slack(const Eigen::VectorXd& x) const {
    if (x.size() != dim_)
        throw ValidationError("goal: point dimension " + std::to_string(x.size()) +
                              " differs from set dimension " + std::to_string(dim_));
    switch (kind_) {
        case Kind::Halfspace:
            return (b_ - a_.dot(x)) / a_.norm();
        case Kind::Ball:
            return b_ - (x - a_).norm();
        case Kind::Box: {
            double s = (x[0] - a_[0]);
            for (int i = 0; i < dim_; ++i)
                s = std::min({s, x[i] - a_[i], c2_[i] - x[i]});
            return s;
        }
        case Kind::DiscInHyperplane: {
            double rho2 = 0.0;
            for (int i = 0; i < dim_; ++i)
                if (i != fixed_coord_) rho2 += (x[i] - a_[i]) * (x[i] - a_[i]);
            return std::min(-std::abs(x[fixed_coord_] - fixed_value_), b_ - std::sqrt(rho2));
        }
        case Kind::AnnulusSector: {
            const double nrm = x.norm();
            return std::min({x[0], x[1], nrm - b_, r2_ - nrm});
        }
        case Kind::Lens:
            return std::min(b_ - (x - a_).norm(), b_ - (x - c2_).norm());
    }
    return -1.0;
}

bool shifted_contains(const GoalSet& q, const Eigen::VectorXd& xhat0, const Eigen::VectorXd& s) {
    return q.contains(xhat0 + s);
}

bool oz_contains(const GoalSet& q, const Eigen::VectorXd& xhat0, const ZVectors& z,
                 const Eigen::VectorXd& r) {
    if (static_cast<std::size_t>(r.size()) != z.size())
        throw ValidationError("oz membership: r length differs from the number of z-vectors");
    Eigen::VectorXd s = xhat0;
    for (std::size_t i = 0; i < z.size(); ++i) s += r[static_cast<Eigen::Index>(i)] * z.z[i];
    return q.contains(s);
}

}  // namespace hitprob
