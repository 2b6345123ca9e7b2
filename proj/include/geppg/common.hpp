#ifndef GEPPG_COMMON_HPP
#define GEPPG_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geppg {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

/// Argument outside the operation's domain (shape mismatch, non-finite input, bad range).
class InputDomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called on an object in the wrong state (empty buffer, empty archive, missing checkpoint).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical breakdown during learning (non-finite gradient or loss).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
    return x.allFinite();
}

} // namespace geppg

#endif
