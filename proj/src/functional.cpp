#include "hitprob/functional.hpp"

#include <cmath>
#include <string>

#include "hitprob/errors.hpp"

namespace hitprob {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace detail {

void validate_mc(const NoiseModel& noise, const McConfig& mc) {
    if (mc.samples < 1) throw ValidationError("mc.samples: must be >= 1");
    if (mc.antithetic) {
        if (!noise.gaussian_family())
            throw ValidationError("mc.antithetic: only valid for gaussian noise models");
        if (mc.samples % 2 != 0)
            throw ValidationError("mc.antithetic: sample count must be even");
    }
}

void draw_xi(const NoiseModel& noise, const McConfig& mc, const Eigen::VectorXd& mean2,
             std::int64_t index, Eigen::VectorXd& xi, Eigen::VectorXd& scratch) {
    if (!mc.antithetic) {
        noise.sample_into(mc.seed, static_cast<std::uint64_t>(index), xi, scratch);
        return;
    }
    noise.sample_into(mc.seed, static_cast<std::uint64_t>(index / 2), xi, scratch);
    if (index % 2 != 0) xi = mean2 - xi;
}

mc::IndicatorSample classify_slack(double slack) {
    return {slack >= -kBoundaryTol, std::abs(slack) <= kBoundaryTol};
}

template <class PairMean>
ProbEstimate finish_estimate(const McConfig& mc, const mc::BinaryTally& tally, mc::Exec exec,
                             PairMean&& pair_mean) {
    ProbEstimate est;
    est.samples = tally.samples;
    est.boundary_hits = tally.boundary;
    est.value = static_cast<double>(tally.inside) / static_cast<double>(tally.samples);
    if (!mc.antithetic) {
        est.std_error =
            std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(tally.samples));
    } else {
        // Variance of the estimator from independent pair means.
        const auto sums = mc::accumulate_moments(mc.samples / 2, exec, pair_mean);
        est.std_error = sums.std_error();
    }
    return est;
}

}  // namespace detail

ProbEstimate evaluate_g_mc(const ZVectors& z, const Eigen::VectorXd& xhat0, const NoiseModel& noise,
                           const GoalSet& q, const McConfig& mc, mc::Exec exec) {
    detail::validate_mc(noise, mc);
    if (z.size() != static_cast<std::size_t>(noise.dimension()))
        throw ValidationError("z-vectors: count differs from noise dimension");
    if (q.dimension() != xhat0.size()) throw ValidationError("goal: dimension differs from state");

    const Eigen::MatrixXd Z = z.as_matrix();
    const Eigen::VectorXd mean2 = 2.0 * noise.mean();

    const auto slack_at = [&](std::int64_t i) {
        static thread_local Eigen::VectorXd xi, scratch, state;
        detail::draw_xi(noise, mc, mean2, i, xi, scratch);
        state = xhat0;
        state.noalias() += Z * xi;
        return q.boundary_slack(state);
    };
    const auto tally = mc::tally_indicator(mc.samples, exec,
                                           [&](std::int64_t i) { return detail::classify_slack(slack_at(i)); });
    return detail::finish_estimate(mc, tally, exec, [&](std::int64_t p) {
        const double a = detail::classify_slack(slack_at(2 * p)).inside ? 1.0 : 0.0;
        const double b = detail::classify_slack(slack_at(2 * p + 1)).inside ? 1.0 : 0.0;
        return 0.5 * (a + b);
    });
}

ProbEstimate evaluate_G_mc(const std::vector<Eigen::VectorXd>& y,
                           const std::vector<Eigen::MatrixXd>& psi, const Eigen::VectorXd& xhat0,
                           const NoiseModel& noise, const GoalSet& q, const McConfig& mc,
                           mc::Exec exec) {
    detail::validate_mc(noise, mc);
    const std::size_t N = static_cast<std::size_t>(noise.dimension());
    if (y.size() != N) throw ValidationError("y: count differs from noise dimension");
    if (psi.size() != N) throw ValidationError("psi: count differs from noise dimension");

    // W columns are Psi_i y_i; the state is xhat0 + W chi.
    Eigen::MatrixXd W(xhat0.size(), static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i)
        W.col(static_cast<Eigen::Index>(i)) = psi[i] * y[i];
    const Eigen::VectorXd mean2 = 2.0 * noise.mean();

    const auto slack_at = [&](std::int64_t i) {
        static thread_local Eigen::VectorXd xi, chi, scratch, state;
        detail::draw_xi(noise, mc, mean2, i, xi, scratch);
        chi_transform_into(xi, chi);
        state = xhat0;
        state.noalias() += W * chi;
        return q.boundary_slack(state);
    };
    const auto tally = mc::tally_indicator(mc.samples, exec,
                                           [&](std::int64_t i) { return detail::classify_slack(slack_at(i)); });
    return detail::finish_estimate(mc, tally, exec, [&](std::int64_t p) {
        const double a = detail::classify_slack(slack_at(2 * p)).inside ? 1.0 : 0.0;
        const double b = detail::classify_slack(slack_at(2 * p + 1)).inside ? 1.0 : 0.0;
        return 0.5 * (a + b);
    });
}

double evaluate_gaussian_halfspace_exact(const ZVectors& z, const Eigen::VectorXd& xhat0,
                                         const NoiseModel& noise, const GoalSet& q) {
    if (q.kind() != GoalSet::Kind::Halfspace)
        throw ValidationError("exact evaluation: goal must be a halfspace");
    if (!noise.gaussian_family())
        throw ValidationError("exact evaluation: noise must be gaussian");
    if (z.size() != static_cast<std::size_t>(noise.dimension()))
        throw ValidationError("z-vectors: count differs from noise dimension");

    const Eigen::VectorXd& a = q.a();
    Eigen::VectorXd w(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) w[static_cast<Eigen::Index>(i)] = a.dot(z.z[i]);

    const double center = a.dot(xhat0) + noise.mean().dot(w);
    const double var = w.dot(noise.covariance_matrix() * w);
    if (var <= 0.0) return center <= q.b() ? 1.0 : 0.0;
    return standard_normal_cdf((q.b() - center) / std::sqrt(var));
}

Eigen::VectorXd gaussian_halfspace_exact_grad(const ZVectors& z, const Eigen::VectorXd& xhat0,
                                              const NoiseModel& noise, const GoalSet& q, int k) {
    if (q.kind() != GoalSet::Kind::Halfspace)
        throw ValidationError("exact gradient: goal must be a halfspace");
    if (!noise.gaussian_family()) throw ValidationError("exact gradient: noise must be gaussian");
    if (k < 0 || static_cast<std::size_t>(k) >= z.size())
        throw ValidationError("exact gradient: k out of range");

    const Eigen::VectorXd& a = q.a();
    Eigen::VectorXd w(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) w[static_cast<Eigen::Index>(i)] = a.dot(z.z[i]);
    const Eigen::VectorXd mu = noise.mean();
    const Eigen::MatrixXd cov = noise.covariance_matrix();

    const double var = w.dot(cov * w);
    if (var <= 0.0) return Eigen::VectorXd::Zero(xhat0.size());
    const double sigma = std::sqrt(var);
    const double alpha = (q.b() - a.dot(xhat0) - mu.dot(w)) / sigma;
    const double pdf = std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * M_PI);
    const double dalpha_dwk = -mu[k] / sigma - alpha * (cov * w)[k] / var;
    return pdf * dalpha_dwk * a;
}

GgComparison compare_g_G(const ZVectors& z, const std::vector<Eigen::VectorXd>& y,
                         const std::vector<Eigen::MatrixXd>& psi, const Eigen::VectorXd& xhat0,
                         const NoiseModel& noise, const GoalSet& q, const McConfig& mc,
                         mc::Exec exec) {
    detail::validate_mc(noise, mc);
    const Eigen::MatrixXd Z = z.as_matrix();
    Eigen::MatrixXd W(xhat0.size(), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i)
        W.col(static_cast<Eigen::Index>(i)) = psi[i] * y[i];
    const Eigen::VectorXd mean2 = 2.0 * noise.mean();

    std::int64_t g_in = 0, G_in = 0, g_bnd = 0, G_bnd = 0, dis = 0, dis_nb = 0;

    const auto body = [&](std::int64_t i, std::int64_t& gi, std::int64_t& Gi, std::int64_t& gb,
                          std::int64_t& Gb, std::int64_t& d, std::int64_t& dnb) {
        static thread_local Eigen::VectorXd xi, chi, scratch, state;
        detail::draw_xi(noise, mc, mean2, i, xi, scratch);
        state = xhat0;
        state.noalias() += Z * xi;
        const auto cg = detail::classify_slack(q.boundary_slack(state));
        chi_transform_into(xi, chi);
        state = xhat0;
        state.noalias() += W * chi;
        const auto cG = detail::classify_slack(q.boundary_slack(state));
        gi += cg.inside ? 1 : 0;
        Gi += cG.inside ? 1 : 0;
        gb += cg.near_boundary ? 1 : 0;
        Gb += cG.near_boundary ? 1 : 0;
        if (cg.inside != cG.inside) {
            ++d;
            if (!cg.near_boundary && !cG.near_boundary) ++dnb;
        }
    };

    if (exec == mc::Exec::Serial) {
        for (std::int64_t i = 0; i < mc.samples; ++i) body(i, g_in, G_in, g_bnd, G_bnd, dis, dis_nb);
    } else {
#pragma omp parallel for schedule(static) reduction(+ : g_in, G_in, g_bnd, G_bnd, dis, dis_nb)
        for (std::int64_t i = 0; i < mc.samples; ++i) body(i, g_in, G_in, g_bnd, G_bnd, dis, dis_nb);
    }

    GgComparison cmp;
    cmp.samples = mc.samples;
    cmp.disagreements = dis;
    cmp.nonboundary_disagreements = dis_nb;
    const double n = static_cast<double>(mc.samples);
    cmp.g = {static_cast<double>(g_in) / n,
             std::sqrt((g_in / n) * (1.0 - g_in / n) / n), mc.samples, g_bnd};
    cmp.G = {static_cast<double>(G_in) / n,
             std::sqrt((G_in / n) * (1.0 - G_in / n) / n), mc.samples, G_bnd};
    return cmp;
}

}  // namespace hitprob
