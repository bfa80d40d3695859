#pragma once

#include <span>
#include <utility>

#include "nttkit/common.hpp"
#include "nttkit/dense.hpp"
#include "nttkit/random.hpp"

namespace nttkit {

/// TT rank array (r_0, r_1, ..., r_d) with r_0 = r_d = 1.
class TTRank {
public:
    TTRank() = default;
    explicit TTRank(std::vector<Index> values);

    /// (1, 1, ..., 1) for an order-d tensor.
    static TTRank ones(Index d);
    /// (1, r, ..., r, 1) for an order-d tensor.
    static TTRank uniform(Index d, Index r);

    Index order() const { return static_cast<Index>(r_.size()) - 1; }
    Index operator[](Index k) const { return r_[static_cast<std::size_t>(k)]; }
    const std::vector<Index>& values() const { return r_; }
    Index max() const;

    bool operator==(const TTRank&) const = default;

    std::string to_string() const;

private:
    std::vector<Index> r_;
};

/// Componentwise-largest rank that any tensor of this shape can carry.
TTRank max_ranks(const Shape& shape);

/// True when r can be the exact TT rank of some tensor of the given shape.
bool is_feasible(const Shape& shape, const TTRank& r);
void require_feasible(const Shape& shape, const TTRank& r);

/// Largest feasible rank that is componentwise <= r.
TTRank clamp_ranks(const Shape& shape, const TTRank& r);

/// Order-3 core of shape r_{k-1} x n_k x r_k.
///
/// Storage is the left unfolding L(U) with row index a + r_{k-1} * i, so the
/// right unfolding R(U) and the slices U(i) are views of the same buffer.
class TTCore {
public:
    TTCore() = default;
    TTCore(Index left, Index size, Index right);

    static TTCore from_left_unfolding(Matrix unfolding, Index left, Index size);
    static TTCore from_right_unfolding(const Matrix& unfolding, Index size, Index right);

    Index left_rank() const { return left_; }
    Index mode_size() const { return size_; }
    Index right_rank() const { return right_; }

    const Matrix& left_unfolding() const { return data_; }
    Matrix& left_unfolding() { return data_; }
    Eigen::Map<const Matrix> right_unfolding() const { return {data_.data(), left_, size_ * right_}; }

    /// U(i) = U(:, i, :), an r_{k-1} x r_k block.
    auto slice(Index i) const { return data_.middleRows(i * left_, left_); }
    auto slice(Index i) { return data_.middleRows(i * left_, left_); }

    cplx operator()(Index a, Index i, Index b) const { return data_(a + left_ * i, b); }
    cplx& operator()(Index a, Index i, Index b) { return data_(a + left_ * i, b); }

    double norm() const { return data_.norm(); }

private:
    Index left_ = 0;
    Index size_ = 0;
    Index right_ = 0;
    Matrix data_;
};

/// Which cores of a TTTensor are known to be orthogonal.
struct Orthogonality {
    enum class Kind { None, Left, Right, Center };
    Kind kind = Kind::None;
    /// Zero-based orthogonality center (meaningful unless kind == None).
    Index center = 0;

    static Orthogonality none() { return {}; }
    static Orthogonality at(Index center, Index order);

    bool operator==(const Orthogonality&) const = default;
};

std::string to_string(Orthogonality orth);

/// Tensor train <U_1, ..., U_d>.
class TTTensor {
public:
    TTTensor() = default;
    explicit TTTensor(std::vector<TTCore> cores, Orthogonality orth = {});

    Index order() const { return static_cast<Index>(cores_.size()); }
    Shape shape() const;
    TTRank ranks() const;
    Orthogonality orthogonality() const { return orth_; }

    const TTCore& core(Index k) const { return cores_[static_cast<std::size_t>(k)]; }
    const std::vector<TTCore>& cores() const { return cores_; }

    /// Number of stored scalars.
    Index parameter_count() const;

    /// Rank-1 tensor u_1 o ... o u_d.
    static TTTensor rank_one(std::span<const Vector> factors);
    /// Zero tensor with all ranks one.
    static TTTensor zeros(const Shape& shape);
    /// Cores with i.i.d. standard Gaussian entries.
    static TTTensor random(const Shape& shape, const TTRank& ranks, Rng& rng, Field field = Field::Complex);

private:
    std::vector<TTCore> cores_;
    Orthogonality orth_;
};

/// Effective-rank bookkeeping for SVD truncations.
struct TruncationReport {
    /// Number of singular values above kRankTolerance * sigma_max at each bond (size d+1).
    std::vector<Index> effective_ranks;
    /// Frobenius norm of discarded singular values at each bond (size d+1).
    std::vector<double> discarded;

    bool rank_deficient(const TTRank& requested) const;
};

cplx tt_entry(const TTTensor& x, std::span<const Index> idx);

DenseTensor tt_full(const TTTensor& x, Index guard = kDefaultDenseGuard);

/// Sequential truncated SVDs, left to right. Output is left-orthogonal.
///
/// Requested ranks above the numerical rank keep the orthonormal singular
/// directions that carry zero weight; the report records effective ranks.
TTTensor tt_svd(const DenseTensor& a, const TTRank& r, TruncationReport* report = nullptr);

/// QR sweeps making cores left of `center` left-orthogonal and cores right of
/// it right-orthogonal. Interior ranks may shrink where a core is rank deficient.
TTTensor orthogonalize(const TTTensor& x, Index center);

double tt_norm(const TTTensor& x);

/// <X, Y>, conjugate-linear in X, via left transfer matrices.
cplx tt_inner(const TTTensor& x, const TTTensor& y);

/// Block-core sum; interior ranks add.
TTTensor tt_add(const TTTensor& x, const TTTensor& y);

/// s * X, applied to the orthogonality center (or last core) so markers stay valid.
TTTensor tt_scale(const TTTensor& x, cplx s);

/// Truncation to ranks <= r without densification: right-orthogonalize, then
/// truncate left to right. Matches tt_svd(tt_full(X), r) in value. Output is left-orthogonal.
TTTensor tt_round(const TTTensor& x, const TTRank& r, TruncationReport* report = nullptr);

/// Interface matrices (X_{<=k}, X_{>=k+1}) with X_<k> = X_{<=k} X_{>=k+1}^T.
/// `k` counts the left modes, 0 <= k <= d; empty products are [1].
std::pair<Matrix, Matrix> interface(const TTTensor& x, Index k, Index guard = kDefaultDenseGuard);

/// (K_d (x) ... (x) K_1) vec(X) as the TT with cores U_k x_2 K_k.
TTTensor kron_apply(const TTTensor& x, std::span<const Matrix> factors);

/// U x_2 K for a single core.
TTCore core_mode_product(const TTCore& core, const Matrix& k);

} // namespace nttkit
