#include "hitprob/noise.hpp"

#include <cmath>
#include <string>

#include "hitprob/errors.hpp"
#include "hitprob/rng.hpp"

namespace hitprob {

NoiseModel NoiseModel::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
    if (mean.size() < 1) throw ValidationError("noise.mean: empty");
    if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
        throw ValidationError("noise.covariance: expected " + std::to_string(mean.size()) + "x" +
                              std::to_string(mean.size()));
    if (!covariance.isApprox(covariance.transpose(), 1e-12))
        throw ValidationError("noise.covariance: not symmetric");
    NoiseModel m;
    m.kind_ = Kind::Gaussian;
    m.dim_ = static_cast<int>(mean.size());
    m.mean_ = std::move(mean);
    m.covariance_ = std::move(covariance);
    m.llt_.compute(m.covariance_);
    if (m.llt_.info() != Eigen::Success)
        throw ValidationError("noise.covariance: not positive definite (Cholesky failed)");
    return m;
}

NoiseModel NoiseModel::product_1d(std::vector<Univariate> components) {
    if (components.empty()) throw ValidationError("noise.components: empty");
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        if (c.kind == Univariate::Kind::Gaussian && !(c.b > 0.0))
            throw ValidationError("noise.components[" + std::to_string(i) + "]: sigma must be > 0");
        if (c.kind == Univariate::Kind::Uniform && !(c.b > c.a))
            throw ValidationError("noise.components[" + std::to_string(i) + "]: need a < b");
    }
    NoiseModel m;
    m.kind_ = Kind::Product1d;
    m.dim_ = static_cast<int>(components.size());
    m.components_ = std::move(components);
    return m;
}

Eigen::VectorXd NoiseModel::sample(std::uint64_t seed, std::uint64_t index) const {
    Eigen::VectorXd xi(dim_), scratch(dim_);
    sample_into(seed, index, xi, scratch);
    return xi;
}

void NoiseModel::sample_into(std::uint64_t seed, std::uint64_t index, Eigen::VectorXd& xi,
                             Eigen::VectorXd& scratch) const {
    xi.resize(dim_);
    if (kind_ == Kind::Gaussian) {
        scratch.resize(dim_);
        for (int j = 0; j < dim_; ++j)
            scratch[j] = rng::standard_normal(seed, index, static_cast<std::uint32_t>(j));
        xi = mean_;
        xi.noalias() += llt_.matrixL() * scratch;
        return;
    }
    for (int j = 0; j < dim_; ++j) {
        const double u = rng::uniform01(seed, index, static_cast<std::uint32_t>(j));
        const auto& c = components_[static_cast<std::size_t>(j)];
        xi[j] = c.kind == Univariate::Kind::Gaussian ? c.a + c.b * rng::inverse_normal_cdf(u)
                                                     : c.a + (c.b - c.a) * u;
    }
}

double NoiseModel::log_density_grad(const Eigen::VectorXd& r, int j) const {
    if (r.size() != dim_) throw ValidationError("score: point dimension mismatch");
    if (j < 0 || j >= dim_) throw ValidationError("score: component index out of range");
    if (kind_ == Kind::Gaussian)
        return -llt_.solve(r - mean_)[j];
    // Product density is zero (or not differentiable) once any uniform
    // factor sits on or outside its support boundary.
    for (int i = 0; i < dim_; ++i) {
        const auto& ci = components_[static_cast<std::size_t>(i)];
        if (ci.kind == Univariate::Kind::Uniform && (r[i] <= ci.a || r[i] >= ci.b))
            throw ScoreUndefinedError("uniform component " + std::to_string(i + 1) +
                                      " evaluated at boundary or outside support");
    }
    const auto& c = components_[static_cast<std::size_t>(j)];
    if (c.kind == Univariate::Kind::Gaussian) return -(r[j] - c.a) / (c.b * c.b);
    return 0.0;  // uniform factor, interior: flat
}

bool NoiseModel::score_differentiable() const {
    if (kind_ == Kind::Gaussian) return true;
    for (const auto& c : components_)
        if (c.kind == Univariate::Kind::Uniform) return false;
    return true;
}

bool NoiseModel::gaussian_family() const { return score_differentiable(); }

Eigen::VectorXd NoiseModel::mean() const {
    if (kind_ == Kind::Gaussian) return mean_;
    Eigen::VectorXd mu(dim_);
    for (int j = 0; j < dim_; ++j) {
        const auto& c = components_[static_cast<std::size_t>(j)];
        mu[j] = c.kind == Univariate::Kind::Gaussian ? c.a : 0.5 * (c.a + c.b);
    }
    return mu;
}

Eigen::MatrixXd NoiseModel::covariance_matrix() const {
    if (kind_ == Kind::Gaussian) return covariance_;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int j = 0; j < dim_; ++j) {
        const auto& c = components_[static_cast<std::size_t>(j)];
        if (c.kind != Univariate::Kind::Gaussian)
            throw ValidationError("covariance requested for a model with uniform factors");
        cov(j, j) = c.b * c.b;
    }
    return cov;
}

Eigen::VectorXd NoiseModel::precision_row(int j) const {
    if (j < 0 || j >= dim_) throw ValidationError("precision_row: index out of range");
    if (kind_ == Kind::Gaussian)
        return llt_.solve(Eigen::VectorXd::Unit(dim_, j));
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim_);
    const auto& c = components_[static_cast<std::size_t>(j)];
    if (c.kind != Univariate::Kind::Gaussian)
        throw ScoreUndefinedError("precision row of a uniform component");
    row[j] = 1.0 / (c.b * c.b);
    return row;
}

Eigen::VectorXd chi_transform(const Eigen::VectorXd& xi) {
    Eigen::VectorXd chi;
    chi_transform_into(xi, chi);
    return chi;
}

void chi_transform_into(const Eigen::VectorXd& xi, Eigen::VectorXd& chi) {
    const Eigen::Index N = xi.size();
    chi.resize(N);
    for (Eigen::Index i = 0; i + 1 < N; ++i) chi[i] = xi[i] - xi[i + 1];
    chi[N - 1] = xi[N - 1];
}

Eigen::VectorXd chi_inverse(const Eigen::VectorXd& chi) {
    const Eigen::Index N = chi.size();
    Eigen::VectorXd xi(N);
    xi[N - 1] = chi[N - 1];
    for (Eigen::Index i = N - 2; i >= 0; --i) xi[i] = chi[i] + xi[i + 1];
    return xi;
}

}  // namespace hitprob
