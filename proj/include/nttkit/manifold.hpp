#pragma once

#include <functional>
#include <memory>
#include <variant>

#include "nttkit/tt.hpp"

namespace nttkit {

/// Strict points must have exact rank r; lenient ones may be rank deficient
/// (warm starts, retractions that hit a degenerate truncation).
enum class RankPolicy { Strict, Lenient };

/// Unit-norm TT tensor of fixed rank, carrying a left-orthogonal family
/// U_1..U_d (U_d included, so ||U_d|| = 1) and a right-orthogonal family Y_1..Y_d.
class NTTPoint {
public:
    /// `left` must be left-orthogonal with unit-norm last core.
    static NTTPoint from_left_orthogonal(TTTensor left, std::vector<Index> effective_ranks = {});

    const TTTensor& left() const { return left_; }
    const TTTensor& right() const { return right_; }
    const TTCore& u(Index k) const { return left_.core(k); }
    const TTCore& y(Index k) const { return right_.core(k); }

    Index order() const { return left_.order(); }
    Shape shape() const { return left_.shape(); }
    TTRank ranks() const { return left_.ranks(); }
    const std::vector<Index>& effective_ranks() const { return effective_; }
    bool rank_deficient() const;

    DenseTensor full(Index guard = kDefaultDenseGuard) const { return tt_full(left_, guard); }

private:
    TTTensor left_;
    TTTensor right_;
    std::vector<Index> effective_;
};

using PointPtr = std::shared_ptr<const NTTPoint>;

/// Gauge-fixed tangent vector sum_k [[U_1..U_{k-1}, W_k, Y_{k+1}..Y_d]].
/// params[k] holds L(W_k), shaped like L(U_k).
struct NTTTangent {
    PointPtr base;
    std::vector<Matrix> params;

    NTTTangent& operator+=(const NTTTangent& o);
    NTTTangent& operator-=(const NTTTangent& o);
    NTTTangent& operator*=(cplx s);
};

NTTTangent operator+(NTTTangent a, const NTTTangent& b);
NTTTangent operator-(NTTTangent a, const NTTTangent& b);
NTTTangent operator*(cplx s, NTTTangent a);
NTTTangent operator-(NTTTangent a);

NTTTangent zero_tangent(const PointPtr& x);

using AmbientVector = std::variant<DenseTensor, TTTensor, SparseTensor>;

/// normalize(tt_svd(A, r)); TT inputs are rounded without densification.
NTTPoint ntt_svd(const AmbientVector& a, const TTRank& r, RankPolicy policy = RankPolicy::Strict);

PointPtr make_point(NTTPoint p);

/// (I - P_k)(I (x) X_{<=k-1})^H Z_<k> conj(X_{>=k+1}) for every k.
NTTTangent project_tangent(const PointPtr& x, const AmbientVector& z);

/// Block-core TT of interior rank 2 r_k representing the tangent vector.
TTTensor tangent_to_tt(const NTTTangent& v);

/// ntt_svd of X + sV, rounded back to the ranks of X.
NTTPoint retract(const NTTPoint& x, const NTTTangent& v, double s);

NTTTangent vector_transport(const PointPtr& y, const NTTTangent& v);

/// sum_k <W_k^V, W_k^W>, conjugate-linear in V. The real part is the metric.
cplx tangent_inner(const NTTTangent& v, const NTTTangent& w);
double tangent_norm(const NTTTangent& v);

NTTPoint random_point(const Shape& shape, const TTRank& r, std::uint64_t seed, Field field = Field::Complex);
NTTPoint random_point(const Shape& shape, const TTRank& r, Rng& rng, Field field = Field::Complex);

/// Orthonormal basis of the tangent space as a real vector space (Re <.,.>).
std::vector<NTTTangent> tangent_basis(const PointPtr& x);

/// sum_k r_{k-1} n_k r_k - sum_{k<d} r_k^2 - 1. The real dimension is twice this.
Index manifold_dim(const Shape& shape, const TTRank& r);

using CostFunction = std::function<double(const NTTPoint&)>;

/// Forward differences along tangent_basis. t <= 0 selects 1e-5 max(1, |f(X)|).
NTTTangent fd_gradient(const PointPtr& x, const CostFunction& f, double t = 0.0);

/// Embed a left-orthogonal point into larger ranks without changing its value.
NTTPoint pad_ranks(const NTTPoint& x, const TTRank& r);

} // namespace nttkit
