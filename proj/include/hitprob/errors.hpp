#pragma once

#include <stdexcept>
#include <string>

namespace hitprob {

/// Bad input data: dimension mismatches, malformed configs, invariant
/// violations detectable before any numerics run. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerics went wrong at run time: singular factorizations, integrator
/// blow-up, regularity failures. CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The noise density is not differentiable where a score was requested.
class ScoreUndefinedError : public NumericalError {
public:
    explicit ScoreUndefinedError(const std::string& msg) : NumericalError("score undefined: " + msg) {}
};

/// A requested set of vectors is singular or numerically rank-deficient.
class NotABasisError : public NumericalError {
public:
    NotABasisError(const std::string& msg, int rank, int dim)
        : NumericalError("not a basis: " + msg), rank_(rank), dim_(dim) {}
    int rank() const { return rank_; }
    int dim() const { return dim_; }

private:
    int rank_;
    int dim_;
};

}  // namespace hitprob
