#pragma once

#include <span>

#include "nttkit/common.hpp"

namespace nttkit {

/// A d-way complex array stored column-major (first index fastest).
class DenseTensor {
public:
    DenseTensor() = default;
    /// Zero tensor of the given shape.
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, Vector data);

    const Shape& shape() const { return shape_; }
    Index order() const { return static_cast<Index>(shape_.size()); }
    Index size() const { return data_.size(); }
    Index dim(Index mode) const { return shape_[mode]; }

    const Vector& data() const { return data_; }
    Vector& data() { return data_; }

    cplx operator()(std::span<const Index> idx) const { return data_[linear_index(idx)]; }
    cplx& operator()(std::span<const Index> idx) { return data_[linear_index(idx)]; }

    Index linear_index(std::span<const Index> idx) const;
    MultiIndex multi_index(Index linear) const;

    double norm() const { return data_.norm(); }

private:
    Shape shape_;
    Vector data_;
};

/// Coordinate-format tensor: a list of (multi-index, value) pairs.
struct SparseTensor {
    Shape shape;
    std::vector<MultiIndex> indices;
    Vector values;

    DenseTensor to_dense(Index guard = kDefaultDenseGuard) const;
};

/// X_<k>: rows enumerate modes 1..k, columns modes k+1..d, both first-index fastest.
/// `k` counts the row modes, 1 <= k <= d-1.
Matrix unfold(const DenseTensor& a, Index k);

/// Inverse of unfold.
DenseTensor fold(const Matrix& m, const Shape& shape, Index k);

/// A x_mode M for zero-based `mode`; M must have shape[mode] columns.
DenseTensor mode_product(const DenseTensor& a, const Matrix& m, Index mode);

/// <A, B> with conjugation on the first argument.
cplx inner(const DenseTensor& a, const DenseTensor& b);

DenseTensor operator+(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator-(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator*(cplx s, const DenseTensor& a);

/// Outer product u_1 o u_2 o ... o u_d.
DenseTensor outer_product(std::span<const Vector> factors);

} // namespace nttkit
