#include "hitprob/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "hitprob/errors.hpp"

namespace hitprob {

namespace {

void check_kj(int k, int j, std::size_t N) {
    if (k < 0 || static_cast<std::size_t>(k) >= N)
        throw ValidationError("k: interval index out of 1.." + std::to_string(N));
    if (j < 0 || static_cast<std::size_t>(j) >= N)
        throw ValidationError("j: interval index out of 1.." + std::to_string(N));
}

}  // namespace

double OneSidedQuotients::combined_se() const {
    return std::sqrt(forward_se * forward_se + backward_se * backward_se);
}

GradEstimate directional_derivative_mc(int k, int j, const ZVectors& z, const Eigen::VectorXd& xhat0,
                                       const NoiseModel& noise, const GoalSet& q, const McConfig& mc,
                                       mc::Exec exec) {
    detail::validate_mc(noise, mc);
    check_kj(k, j, z.size());
    if (!noise.score_differentiable())
        throw ScoreUndefinedError("noise density is not differentiable (uniform factor present)");
    if (z.size() != static_cast<std::size_t>(noise.dimension()))
        throw ValidationError("z-vectors: count differs from noise dimension");

    const Eigen::MatrixXd Z = z.as_matrix();
    const Eigen::VectorXd mean = noise.mean();
    const Eigen::VectorXd mean2 = 2.0 * mean;
    const Eigen::VectorXd prec_j = noise.precision_row(j);
    const double delta_kj = (k == j) ? 1.0 : 0.0;

    const auto sums = mc::accumulate_moments(mc.samples, exec, [&](std::int64_t i) {
        static thread_local Eigen::VectorXd xi, scratch, state;
        detail::draw_xi(noise, mc, mean2, i, xi, scratch);
        state = xhat0;
        state.noalias() += Z * xi;
        if (q.boundary_slack(state) < -kBoundaryTol) return 0.0;
        const double score_j = -prec_j.dot(xi - mean);
        return -(delta_kj + xi[k] * score_j);
    });

    return {sums.mean(), sums.std_error(), sums.samples};
}

GradEstimate finite_difference_directional(int k, int j, const ZVectors& z,
                                           const Eigen::VectorXd& xhat0, const NoiseModel& noise,
                                           const GoalSet& q, const McConfig& mc, double step,
                                           mc::Exec exec) {
    detail::validate_mc(noise, mc);
    check_kj(k, j, z.size());
    if (!(step > 0.0)) throw ValidationError("step: must be > 0");

    Eigen::MatrixXd Zp = z.as_matrix();
    Eigen::MatrixXd Zm = Zp;
    Zp.col(k) += step * Zp.col(j);
    Zm.col(k) -= step * Zm.col(j);
    const Eigen::VectorXd mean2 = 2.0 * noise.mean();

    const auto sums = mc::accumulate_moments(mc.samples, exec, [&](std::int64_t i) {
        static thread_local Eigen::VectorXd xi, scratch, state;
        detail::draw_xi(noise, mc, mean2, i, xi, scratch);
        state = xhat0;
        state.noalias() += Zp * xi;
        const double ind_p = q.boundary_slack(state) >= -kBoundaryTol ? 1.0 : 0.0;
        state = xhat0;
        state.noalias() += Zm * xi;
        const double ind_m = q.boundary_slack(state) >= -kBoundaryTol ? 1.0 : 0.0;
        return ind_p - ind_m;
    });

    return {sums.mean() / (2.0 * step), sums.std_error() / (2.0 * step), sums.samples};
}

DualBasis dual_basis(const std::vector<Eigen::VectorXd>& z_basis) {
    const int n = static_cast<int>(z_basis.size());
    if (n == 0) throw ValidationError("dual basis: empty vector set");
    for (const auto& v : z_basis)
        if (v.size() != n)
            throw ValidationError("dual basis: need exactly n vectors of length n");

    Eigen::MatrixXd Zb(n, n);
    for (int i = 0; i < n; ++i) Zb.col(i) = z_basis[static_cast<std::size_t>(i)];

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Zb);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(smin > 0.0) || cond > 1e12) {
        int rank = 0;
        for (int i = 0; i < n; ++i)
            if (svd.singularValues()(i) > 1e-12 * std::max(smax, 1e-300)) ++rank;
        throw NotABasisError("z-vectors span a subspace of dimension " + std::to_string(rank) +
                                 " < " + std::to_string(n),
                             rank, n);
    }

    const Eigen::MatrixXd E =
        Zb.transpose().fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    DualBasis dual;
    dual.gram_condition = cond;
    dual.e.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dual.e.push_back(E.col(i));
    return dual;
}

std::vector<int> select_basis_indices(const ZVectors& z, int n) {
    const Eigen::MatrixXd Z = z.as_matrix();
    if (Z.rows() != n || Z.cols() < n)
        throw ValidationError("basis selection: need at least n z-vectors of length n");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    const auto perm = qr.colsPermutation().indices();
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = perm(i);
    std::sort(idx.begin(), idx.end());
    return idx;
}

GradientResult gradient_hk(int k, const ZVectors& z, std::vector<int> basis_indices,
                           const Eigen::VectorXd& xhat0, const NoiseModel& noise, const GoalSet& q,
                           const McConfig& mc, mc::Exec exec) {
    const int n = z.dim();
    const std::size_t N = z.size();
    if (k < 0 || static_cast<std::size_t>(k) >= N)
        throw ValidationError("k: interval index out of 1.." + std::to_string(N));
    if (static_cast<int>(N) < n)
        throw NotABasisError("fewer z-vectors than state dimensions (need N >= n)",
                             static_cast<int>(N), n);

    if (basis_indices.empty()) basis_indices = select_basis_indices(z, n);
    if (static_cast<int>(basis_indices.size()) != n)
        throw ValidationError("basis_indices: need exactly n indices");
    for (int idx : basis_indices)
        if (idx < 0 || static_cast<std::size_t>(idx) >= N)
            throw ValidationError("basis_indices: index out of range");

    std::vector<Eigen::VectorXd> zb;
    zb.reserve(basis_indices.size());
    for (int idx : basis_indices) zb.push_back(z.z[static_cast<std::size_t>(idx)]);
    const DualBasis dual = dual_basis(zb);

    GradientResult res;
    res.basis_indices = basis_indices;
    res.gram_condition = dual.gram_condition;
    res.directional.reserve(basis_indices.size());
    for (int idx : basis_indices)
        res.directional.push_back(directional_derivative_mc(k, idx, z, xhat0, noise, q, mc, exec));

    // Two algebraically equal assemblies: the dual-pair double sum and the
    // direct dual expansion. Computed both ways as a consistency guard.
    Eigen::VectorXd grad_pairs = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd grad_direct = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const double dj = res.directional[static_cast<std::size_t>(j)].value;
        grad_direct += dj * dual.e[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i)
            grad_pairs += dj * dual.e[static_cast<std::size_t>(j)].dot(dual.e[static_cast<std::size_t>(i)]) *
                          zb[static_cast<std::size_t>(i)];
    }
    const double mismatch = (grad_pairs - grad_direct).cwiseAbs().maxCoeff();
    if (mismatch > 1e-10 * std::max(1.0, grad_direct.cwiseAbs().maxCoeff()))
        throw NumericalError("gradient assembly mismatch " + std::to_string(mismatch) +
                             " (ill-conditioned basis?)");

    res.grad = grad_direct;
    res.std_error = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < n; ++c) {
        double s2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double term = res.directional[static_cast<std::size_t>(j)].std_error *
                                dual.e[static_cast<std::size_t>(j)][c];
            s2 += term * term;
        }
        res.std_error[c] = std::sqrt(s2);
    }
    return res;
}

namespace {

struct RayProblem {
    GoalSet q;
    ZVectors z;
    Eigen::VectorXd xhat0;
    NoiseModel noise;
};

// Estimates the one-sided difference quotients of h(z + s*dir) at s = 0 with
// common random numbers on each side of the difference.
OneSidedQuotients one_sided_quotients(const RayProblem& p, int moved, const Eigen::VectorXd& dir,
                                      double step, const McConfig& mc, mc::Exec exec) {
    const Eigen::MatrixXd Z0 = p.z.as_matrix();
    Eigen::MatrixXd Zp = Z0, Zm = Z0;
    Zp.col(moved) += step * dir;
    Zm.col(moved) -= step * dir;
    const Eigen::VectorXd mean2 = 2.0 * p.noise.mean();

    const auto quotient = [&](const Eigen::MatrixXd& Za, const Eigen::MatrixXd& Zb) {
        const auto sums = mc::accumulate_moments(mc.samples, exec, [&](std::int64_t i) {
            static thread_local Eigen::VectorXd xi, scratch, state;
            detail::draw_xi(p.noise, mc, mean2, i, xi, scratch);
            state = p.xhat0;
            state.noalias() += Za * xi;
            const double ia = p.q.boundary_slack(state) >= -kBoundaryTol ? 1.0 : 0.0;
            state = p.xhat0;
            state.noalias() += Zb * xi;
            const double ib = p.q.boundary_slack(state) >= -kBoundaryTol ? 1.0 : 0.0;
            return ia - ib;
        });
        return std::pair<double, double>{sums.mean() / step, sums.std_error() / step};
    };

    OneSidedQuotients out;
    out.step = step;
    std::tie(out.forward, out.forward_se) = quotient(Zp, Z0);
    std::tie(out.backward, out.backward_se) = quotient(Z0, Zm);
    return out;
}

// Endpoints of the (single) membership interval of { r >= 0 : r z in Q },
// located by a coarse scan and sharpened by bisection.
std::pair<double, double> scan_ray_interval(const GoalSet& q, const ZVectors& z,
                                            const Eigen::VectorXd& xhat0, double r_max) {
    const auto member = [&](double r) {
        Eigen::VectorXd rv(1);
        rv[0] = r;
        return oz_contains(q, xhat0, z, rv);
    };
    const int steps = 20000;
    const double h = r_max / steps;
    int first = -1, last = -1;
    for (int i = 0; i <= steps; ++i) {
        if (member(i * h)) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) return {0.0, 0.0};

    const auto bisect = [&](double lo, double hi, bool want_entry) {
        // Invariant: membership differs between lo and hi.
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (member(mid) == want_entry)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    };

    double lo_edge = first * h;
    if (first > 0) lo_edge = bisect((first - 1) * h, first * h, true);
    double hi_edge = last * h;
    if (last < steps) hi_edge = bisect(last * h, (last + 1) * h, false);
    return {lo_edge, hi_edge};
}

}  // namespace

NonsmoothExampleReport nonsmoothness_suite(int example, const McConfig& mc, mc::Exec exec) {
    NonsmoothExampleReport rep;
    rep.example = example;

    if (example == 1) {
        // Disc inside the hyperplane x_1 = 0; perturbing the first z-vector
        // off the plane kills the probability outright.
        RayProblem p{GoalSet::disc_in_hyperplane(0, 0.0, Eigen::Vector3d(0.0, 2.0, 2.0), 1.0),
                     ZVectors{{Eigen::Vector3d(0.0, 0.0, 1.0), Eigen::Vector3d(0.0, 1.0, 0.0)}},
                     Eigen::Vector3d::Zero(),
                     NoiseModel::gaussian(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity())};

        const auto base = evaluate_g_mc(p.z, p.xhat0, p.noise, p.q, mc, exec);
        rep.h_at_z = base.value;
        rep.h_at_z_se = base.std_error;
        rep.perturbations = {1e-3, 1e-2};
        bool all_zero = true;
        for (double delta : rep.perturbations) {
            ZVectors zp = p.z;
            zp.z[0][0] += delta;
            const auto est = evaluate_g_mc(zp, p.xhat0, p.noise, p.q, mc, exec);
            rep.h_perturbed.push_back(est.value);
            all_zero = all_zero && est.value == 0.0;
        }
        rep.downward_jump = rep.h_at_z > 0.01 && all_zero;
        return rep;
    }

    if (example == 2 || example == 3) {
        const GoalSet q = example == 2
                              ? GoalSet::annulus_sector(1.0, std::sqrt(2.0))
                              : GoalSet::lens(Eigen::Vector2d(7.0, 0.0), Eigen::Vector2d(0.0, 7.0), 5.0);
        const Eigen::Vector2d zstar = example == 2 ? Eigen::Vector2d(0.0, 1.0) : Eigen::Vector2d(1.0, 1.0);
        RayProblem p{q, ZVectors{{zstar}}, Eigen::Vector2d::Zero(),
                     NoiseModel::gaussian(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1))};

        const auto base = evaluate_g_mc(p.z, p.xhat0, p.noise, p.q, mc, exec);
        rep.h_at_z = base.value;
        rep.h_at_z_se = base.std_error;
        rep.quotients = one_sided_quotients(p, 0, Eigen::Vector2d(1.0, 0.0), 0.05, mc, exec);
        rep.one_sided_mismatch =
            std::abs(rep.quotients.gap()) > 3.0 * rep.quotients.combined_se();
        std::tie(rep.region_lo, rep.region_hi) =
            scan_ray_interval(p.q, p.z, p.xhat0, example == 2 ? 3.0 : 8.0);
        return rep;
    }

    throw ValidationError("example: must be 1, 2 or 3");
}

}  // namespace hitprob
