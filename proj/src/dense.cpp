#include "nttkit/dense.hpp"

#include <limits>
#include <sstream>

namespace nttkit {

Index shape_size(const Shape& shape) {
    Index n = 1;
    for (Index s : shape) n *= s;
    return n;
}

Index checked_shape_size(const Shape& shape, Index guard) {
    Index n = 1;
    for (Index s : shape) {
        if (s <= 0) throw ShapeError("mode sizes must be positive, got " + shape_to_string(shape));
        if (n > guard / s) {
            throw SizeGuardError("tensor of shape " + shape_to_string(shape) +
                                 " exceeds the dense size guard of " + std::to_string(guard) + " entries");
        }
        n *= s;
    }
    if (n > guard) {
        throw SizeGuardError("tensor of shape " + shape_to_string(shape) + " exceeds the dense size guard");
    }
    return n;
}

std::string shape_to_string(const Shape& shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ')';
    return os.str();
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
    if (shape_.empty()) throw ShapeError("tensor order must be at least 1");
    data_ = Vector::Zero(checked_shape_size(shape_, std::numeric_limits<Index>::max()));
}

DenseTensor::DenseTensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty()) throw ShapeError("tensor order must be at least 1");
    if (shape_size(shape_) != data_.size()) {
        throw ShapeError("entry count " + std::to_string(data_.size()) + " does not match shape " +
                         shape_to_string(shape_));
    }
}

Index DenseTensor::linear_index(std::span<const Index> idx) const {
    if (static_cast<Index>(idx.size()) != order()) throw ShapeError("multi-index has wrong length");
    Index lin = 0;
    Index stride = 1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= shape_[k]) throw ShapeError("multi-index out of range");
        lin += idx[k] * stride;
        stride *= shape_[k];
    }
    return lin;
}

MultiIndex DenseTensor::multi_index(Index linear) const {
    MultiIndex idx(shape_.size());
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        idx[k] = linear % shape_[k];
        linear /= shape_[k];
    }
    return idx;
}

DenseTensor SparseTensor::to_dense(Index guard) const {
    checked_shape_size(shape, guard);
    DenseTensor out(shape);
    for (std::size_t e = 0; e < indices.size(); ++e) out(indices[e]) += values[static_cast<Index>(e)];
    return out;
}

Matrix unfold(const DenseTensor& a, Index k) {
    const Index d = a.order();
    if (k < 1 || k > d - 1) {
        throw ShapeError("unfolding index " + std::to_string(k) + " out of range for order " + std::to_string(d));
    }
    Index rows = 1;
    for (Index j = 0; j < k; ++j) rows *= a.dim(j);
    // Column-major storage already realizes the unfolding index map.
    return Eigen::Map<const Matrix>(a.data().data(), rows, a.size() / rows);
}

DenseTensor fold(const Matrix& m, const Shape& shape, Index k) {
    const Index d = static_cast<Index>(shape.size());
    if (k < 1 || k > d - 1) throw ShapeError("fold index out of range");
    Index rows = 1;
    for (Index j = 0; j < k; ++j) rows *= shape[j];
    if (m.rows() != rows || m.size() != shape_size(shape)) throw ShapeError("matrix does not fit shape");
    return DenseTensor(shape, Eigen::Map<const Vector>(m.data(), m.size()));
}

DenseTensor mode_product(const DenseTensor& a, const Matrix& m, Index mode) {
    if (mode < 0 || mode >= a.order()) throw ShapeError("mode out of range");
    if (m.cols() != a.dim(mode)) {
        throw ShapeError("mode product: matrix has " + std::to_string(m.cols()) + " columns, mode size is " +
                         std::to_string(a.dim(mode)));
    }
    Index before = 1;
    for (Index j = 0; j < mode; ++j) before *= a.dim(j);
    const Index n = a.dim(mode);
    const Index after = a.size() / (before * n);

    Shape out_shape = a.shape();
    out_shape[mode] = m.rows();
    DenseTensor out(out_shape);
    for (Index t = 0; t < after; ++t) {
        Eigen::Map<const Matrix> slab(a.data().data() + t * before * n, before, n);
        Eigen::Map<Matrix> dst(out.data().data() + t * before * m.rows(), before, m.rows());
        dst.noalias() = slab * m.transpose();
    }
    return out;
}

cplx inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("inner product of tensors with different shapes");
    return a.data().dot(b.data());
}

DenseTensor operator+(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("sum of tensors with different shapes");
    return DenseTensor(a.shape(), a.data() + b.data());
}

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("difference of tensors with different shapes");
    return DenseTensor(a.shape(), a.data() - b.data());
}

DenseTensor operator*(cplx s, const DenseTensor& a) { return DenseTensor(a.shape(), s * a.data()); }

DenseTensor outer_product(std::span<const Vector> factors) {
    if (factors.empty()) throw ShapeError("outer product needs at least one factor");
    Shape shape;
    Vector acc = Vector::Ones(1);
    for (const auto& f : factors) {
        shape.push_back(f.size());
        Vector next(acc.size() * f.size());
        for (Index i = 0; i < f.size(); ++i) next.segment(i * acc.size(), acc.size()) = f[i] * acc;
        acc = std::move(next);
    }
    return DenseTensor(std::move(shape), std::move(acc));
}

} // namespace nttkit
