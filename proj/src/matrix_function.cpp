#include "hitprob/matrix_function.hpp"

#include <algorithm>

#include "hitprob/errors.hpp"

namespace hitprob {

MatrixFunction MatrixFunction::constant(Eigen::MatrixXd value) {
    MatrixFunction f;
    f.values_.push_back(std::move(value));
    return f;
}

MatrixFunction MatrixFunction::sampled(std::vector<double> times, std::vector<Eigen::MatrixXd> values) {
    if (times.size() != values.size() || times.empty())
        throw ValidationError("matrix samples: times and values must have equal nonzero length");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ValidationError("matrix samples: times not strictly increasing");
    const auto rows = values.front().rows();
    const auto cols = values.front().cols();
    for (const auto& v : values)
        if (v.rows() != rows || v.cols() != cols)
            throw ValidationError("matrix samples: inconsistent shapes");
    if (times.size() == 1) return constant(values.front());

    MatrixFunction f;
    f.times_ = std::move(times);
    f.values_ = std::move(values);
    return f;
}

Eigen::MatrixXd MatrixFunction::operator()(double t) const {
    Eigen::MatrixXd out;
    eval_into(t, out);
    return out;
}

void MatrixFunction::eval_into(double t, Eigen::MatrixXd& out) const {
    if (is_constant()) {
        out = values_.front();
        return;
    }
    if (t <= times_.front()) {
        out = values_.front();
        return;
    }
    if (t >= times_.back()) {
        out = values_.back();
        return;
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    out = (1.0 - w) * values_[lo] + w * values_[hi];
}

}  // namespace hitprob
