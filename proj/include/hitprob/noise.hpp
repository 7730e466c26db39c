#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hitprob {

/// One factor of a product density.
struct Univariate {
    enum class Kind { Gaussian, Uniform };
    Kind kind = Kind::Gaussian;
    double a = 0.0;  // mean / lower bound
    double b = 1.0;  // stddev / upper bound
};

/// Law of the random multiplier vector xi = (xi_1, ..., xi_N). Sampling is
/// counter-based: component draws are pure functions of (seed, index), so
/// any index range can be generated concurrently and results never depend
/// on thread count or scheduling.
class NoiseModel {
public:
    enum class Kind { Gaussian, Product1d };

    static NoiseModel gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
    static NoiseModel product_1d(std::vector<Univariate> components);

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }

    Eigen::VectorXd sample(std::uint64_t seed, std::uint64_t index) const;
    void sample_into(std::uint64_t seed, std::uint64_t index, Eigen::VectorXd& xi,
                     Eigen::VectorXd& scratch) const;

    /// d log f / d r_j (0-based j). Throws ScoreUndefinedError where the
    /// density vanishes or is not differentiable.
    double log_density_grad(const Eigen::VectorXd& r, int j) const;

    /// True when every marginal is differentiable everywhere (gaussian
    /// families); uniform factors make the score-function estimator invalid.
    bool score_differentiable() const;

    /// Gaussian or all-gaussian product; antithetic reflection needs this.
    bool gaussian_family() const;

    Eigen::VectorXd mean() const;

    /// Covariance matrix of a gaussian-family model (diagonal for gaussian
    /// products); throws for models with uniform factors.
    Eigen::MatrixXd covariance_matrix() const;

    /// Row j of the inverse covariance (gaussian kind), for allocation-free
    /// score evaluation in sampling kernels.
    Eigen::VectorXd precision_row(int j) const;

private:
    Kind kind_ = Kind::Gaussian;
    int dim_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    std::vector<Univariate> components_;
};

/// chi_i = xi_i - xi_{i+1}, chi_N = xi_N.
Eigen::VectorXd chi_transform(const Eigen::VectorXd& xi);
void chi_transform_into(const Eigen::VectorXd& xi, Eigen::VectorXd& chi);

/// Inverse of chi_transform, accumulated from the tail down.
Eigen::VectorXd chi_inverse(const Eigen::VectorXd& chi);

}  // namespace hitprob
