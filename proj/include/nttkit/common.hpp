#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nttkit {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Mode sizes n_1..n_d.
using Shape = std::vector<Index>;
/// Zero-based multi-index into a tensor of a given Shape.
using MultiIndex = std::vector<Index>;

/// Entry limit for anything that materializes a full tensor.
inline constexpr Index kDefaultDenseGuard = Index{1} << 24;

/// Tolerance used when checking orthogonality invariants.
inline constexpr double kOrthTolerance = 1e-10;

/// Singular values below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-14;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension, shape or index mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Rank request is infeasible, or a result came out rank deficient.
class RankError : public Error {
public:
    using Error::Error;
};

/// Dense materialization would exceed the configured guard.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, failed factorizations, degenerate normalizations.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter values (out-of-range probabilities, non-positive steps).
class DomainError : public Error {
public:
    using Error::Error;
};

Index shape_size(const Shape& shape);

/// Throws SizeGuardError when the product of the shape exceeds `guard`.
Index checked_shape_size(const Shape& shape, Index guard);

std::string shape_to_string(const Shape& shape);

} // namespace nttkit
