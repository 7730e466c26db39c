#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hitprob {

/// Time-dependent matrix on [0,1]: either a constant or samples at
/// breakpoint times with linear interpolation in between. Evaluation outside
/// the sampled range clamps to the nearest endpoint.
class MatrixFunction {
public:
    static MatrixFunction constant(Eigen::MatrixXd value);
    static MatrixFunction sampled(std::vector<double> times, std::vector<Eigen::MatrixXd> values);

    Eigen::Index rows() const { return values_.front().rows(); }
    Eigen::Index cols() const { return values_.front().cols(); }
    bool is_constant() const { return times_.empty(); }

    Eigen::MatrixXd operator()(double t) const;
    void eval_into(double t, Eigen::MatrixXd& out) const;

private:
    std::vector<double> times_;             // empty for the constant case
    std::vector<Eigen::MatrixXd> values_;   // single entry for the constant case
};

}  // namespace hitprob
