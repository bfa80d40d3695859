#include "nttkit/manifold.hpp"

#include <cmath>

#include <Eigen/QR>

namespace nttkit {

namespace {

void require_same_base(const NTTTangent& a, const NTTTangent& b) {
    if (a.base.get() != b.base.get()) throw ShapeError("tangent vectors belong to different base points");
}

// X_{>=k+1} of the right family for every k = 0..d (k counts left modes).
std::vector<Matrix> right_interfaces(const TTTensor& y) {
    const Index d = y.order();
    std::vector<Matrix> out(static_cast<std::size_t>(d + 1));
    out[static_cast<std::size_t>(d)] = Matrix::Ones(1, 1);
    for (Index k = d - 1; k >= 0; --k) {
        const auto& c = y.core(k);
        const Matrix& g = out[static_cast<std::size_t>(k + 1)];
        const Index n = c.mode_size(), rest = g.rows();
        Matrix next(n * rest, c.left_rank());
        for (Index i = 0; i < n; ++i) {
            Matrix t = g * c.slice(i).transpose();
            for (Index q = 0; q < rest; ++q) next.row(i + n * q) = t.row(q);
        }
        out[static_cast<std::size_t>(k)] = std::move(next);
    }
    return out;
}

std::vector<Matrix> contract_dense(const NTTPoint& p, const DenseTensor& z) {
    const Index d = p.order();
    const auto rin = right_interfaces(p.right());
    std::vector<Matrix> m(static_cast<std::size_t>(d));
    Matrix t = Eigen::Map<const Matrix>(z.data().data(), 1, z.size());
    for (Index k = 0; k < d; ++k) {
        const auto& u = p.u(k);
        const Index rows = u.left_rank() * u.mode_size();
        Eigen::Map<const Matrix> mt(t.data(), rows, t.size() / rows);
        m[static_cast<std::size_t>(k)] = mt * rin[static_cast<std::size_t>(k + 1)].conjugate();
        if (k + 1 < d) t = u.left_unfolding().adjoint() * mt;
    }
    return m;
}

std::vector<Matrix> contract_tt(const NTTPoint& p, const TTTensor& z) {
    const Index d = p.order();
    std::vector<Matrix> renv(static_cast<std::size_t>(d + 1));
    renv[static_cast<std::size_t>(d)] = Matrix::Ones(1, 1);
    for (Index j = d - 1; j >= 0; --j) {
        const auto& zc = z.core(j);
        const auto& yc = p.y(j);
        const Matrix& next = renv[static_cast<std::size_t>(j + 1)];
        Matrix acc = Matrix::Zero(zc.left_rank(), yc.left_rank());
        for (Index i = 0; i < zc.mode_size(); ++i) acc.noalias() += zc.slice(i) * (next * yc.slice(i).adjoint());
        renv[static_cast<std::size_t>(j)] = std::move(acc);
    }

    std::vector<Matrix> m(static_cast<std::size_t>(d));
    Matrix lenv = Matrix::Ones(1, 1);
    for (Index k = 0; k < d; ++k) {
        const auto& u = p.u(k);
        const auto& zc = z.core(k);
        const Matrix& re = renv[static_cast<std::size_t>(k + 1)];
        Matrix mk(u.left_rank() * u.mode_size(), u.right_rank());
        for (Index i = 0; i < u.mode_size(); ++i)
            mk.middleRows(i * u.left_rank(), u.left_rank()).noalias() = lenv * zc.slice(i) * re;
        m[static_cast<std::size_t>(k)] = std::move(mk);
        if (k + 1 < d) {
            Matrix lz = lenv * zc.right_unfolding();
            Eigen::Map<const Matrix> lzl(lz.data(), u.left_rank() * u.mode_size(), zc.right_rank());
            lenv = u.left_unfolding().adjoint() * lzl;
        }
    }
    return m;
}

std::vector<Matrix> contract_sparse(const NTTPoint& p, const SparseTensor& z) {
    const Index d = p.order();
    std::vector<Matrix> m(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k)
        m[static_cast<std::size_t>(k)] = Matrix::Zero(p.u(k).left_unfolding().rows(), p.u(k).right_rank());

    std::vector<Eigen::RowVectorXcd> pre(static_cast<std::size_t>(d + 1));
    std::vector<Vector> suf(static_cast<std::size_t>(d + 1));
    for (std::size_t e = 0; e < z.indices.size(); ++e) {
        const auto& idx = z.indices[e];
        const cplx val = z.values[static_cast<Index>(e)];
        pre[0] = Eigen::RowVectorXcd::Ones(1);
        for (Index k = 0; k < d; ++k)
            pre[static_cast<std::size_t>(k + 1)] = pre[static_cast<std::size_t>(k)] * p.u(k).slice(idx[static_cast<std::size_t>(k)]);
        suf[static_cast<std::size_t>(d)] = Vector::Ones(1);
        for (Index k = d - 1; k >= 0; --k)
            suf[static_cast<std::size_t>(k)] = p.y(k).slice(idx[static_cast<std::size_t>(k)]) * suf[static_cast<std::size_t>(k + 1)];
        for (Index k = 0; k < d; ++k) {
            const Index r = p.u(k).left_rank();
            const Index i = idx[static_cast<std::size_t>(k)];
            m[static_cast<std::size_t>(k)].middleRows(i * r, r).noalias() +=
                val * pre[static_cast<std::size_t>(k)].adjoint() * suf[static_cast<std::size_t>(k + 1)].adjoint();
        }
    }
    return m;
}

void require_point_shape(const NTTPoint& p, const Shape& s) {
    if (p.shape() != s) {
        throw ShapeError("ambient shape " + shape_to_string(s) + " does not match point shape " +
                         shape_to_string(p.shape()));
    }
}

Shape ambient_shape(const AmbientVector& z) {
    return std::visit(
        [](const auto& a) -> Shape {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SparseTensor>) return a.shape;
            else return a.shape();
        },
        z);
}

// [[a, 0], [b, c]] style block slices for the rank-2r representations.
TTTensor block_tensor(const NTTPoint& p, const std::vector<Matrix>& w, double s, bool add_point) {
    const Index d = p.order();
    std::vector<TTCore> cores;
    for (Index k = 0; k < d; ++k) {
        const auto& u = p.u(k);
        const auto& y = p.y(k);
        const Index l = u.left_rank(), r = u.right_rank(), n = u.mode_size();
        const TTCore wk = TTCore::from_left_unfolding(s * w[static_cast<std::size_t>(k)], l, n);
        if (k == 0) {
            TTCore c(1, n, 2 * r);
            for (Index i = 0; i < n; ++i) {
                c.slice(i).leftCols(r) = wk.slice(i);
                c.slice(i).rightCols(r) = u.slice(i);
            }
            cores.push_back(std::move(c));
        } else if (k == d - 1) {
            TTCore c(2 * l, n, 1);
            for (Index i = 0; i < n; ++i) {
                c.slice(i).topRows(l) = y.slice(i);
                c.slice(i).bottomRows(l) = wk.slice(i);
                if (add_point) c.slice(i).bottomRows(l) += u.slice(i);
            }
            cores.push_back(std::move(c));
        } else {
            TTCore c(2 * l, n, 2 * r);
            for (Index i = 0; i < n; ++i) {
                c.slice(i).topLeftCorner(l, r) = y.slice(i);
                c.slice(i).bottomLeftCorner(l, r) = wk.slice(i);
                c.slice(i).bottomRightCorner(l, r) = u.slice(i);
            }
            cores.push_back(std::move(c));
        }
    }
    return TTTensor(std::move(cores));
}

NTTPoint normalized(TTTensor t, const TTRank& r, const TruncationReport& rep, RankPolicy policy) {
    const Index d = t.order();
    std::vector<TTCore> cores = t.cores();
    const double nrm = cores.back().norm();
    if (!(nrm >= 1e-14)) throw NumericalError("cannot normalize a tensor of norm " + std::to_string(nrm));
    cores.back().left_unfolding() /= nrm;
    if (policy == RankPolicy::Strict && rep.rank_deficient(r)) {
        std::string eff;
        for (Index e : rep.effective_ranks) eff += (eff.empty() ? "" : ",") + std::to_string(e);
        throw RankError("effective rank (" + eff + ") is below the requested " + r.to_string());
    }
    NTTPoint p = NTTPoint::from_left_orthogonal(TTTensor(std::move(cores), Orthogonality::at(d - 1, d)),
                                                rep.effective_ranks);
    if (p.ranks() != r) p = pad_ranks(p, r);
    return p;
}

} // namespace

// ---------------------------------------------------------------- points

NTTPoint NTTPoint::from_left_orthogonal(TTTensor left, std::vector<Index> effective_ranks) {
    NTTPoint p;
    const Index d = left.order();
    p.left_ = TTTensor(left.cores(), Orthogonality::at(d - 1, d));
    p.right_ = orthogonalize(p.left_, 0);
    if (p.right_.ranks() != p.left_.ranks()) throw RankError("right-orthogonal family changed the ranks");
    p.effective_ = effective_ranks.empty() ? p.left_.ranks().values() : std::move(effective_ranks);
    return p;
}

bool NTTPoint::rank_deficient() const {
    const auto& r = left_.ranks().values();
    for (std::size_t k = 0; k < r.size(); ++k)
        if (effective_[k] < r[k]) return true;
    return false;
}

PointPtr make_point(NTTPoint p) { return std::make_shared<const NTTPoint>(std::move(p)); }

NTTPoint ntt_svd(const AmbientVector& a, const TTRank& r, RankPolicy policy) {
    TruncationReport rep;
    TTTensor t = std::visit(
        [&](const auto& z) -> TTTensor {
            using T = std::decay_t<decltype(z)>;
            if constexpr (std::is_same_v<T, DenseTensor>) return tt_svd(z, r, &rep);
            else if constexpr (std::is_same_v<T, TTTensor>) return tt_round(z, r, &rep);
            else return tt_svd(z.to_dense(), r, &rep);
        },
        a);
    return normalized(std::move(t), r, rep, policy);
}

NTTPoint random_point(const Shape& shape, const TTRank& r, Rng& rng, Field field) {
    require_feasible(shape, r);
    return ntt_svd(TTTensor::random(shape, r, rng, field), r, RankPolicy::Strict);
}

NTTPoint random_point(const Shape& shape, const TTRank& r, std::uint64_t seed, Field field) {
    Rng rng(seed);
    return random_point(shape, r, rng, field);
}

NTTPoint pad_ranks(const NTTPoint& x, const TTRank& r) {
    const Shape shape = x.shape();
    const TTRank old = x.ranks();
    require_feasible(shape, r);
    const Index d = x.order();
    for (Index k = 0; k <= d; ++k)
        if (r[k] < old[k]) throw RankError("pad_ranks cannot shrink " + old.to_string() + " to " + r.to_string());
    if (r == old) return x;

    std::vector<TTCore> cores;
    for (Index k = 0; k < d; ++k) {
        const auto& u = x.u(k);
        const Index n = u.mode_size();
        const Index l0 = old[k], r0 = old[k + 1], l1 = r[k], r1 = r[k + 1];
        Matrix m = Matrix::Zero(l1 * n, r1);
        for (Index i = 0; i < n; ++i) m.block(i * l1, 0, l0, r0) = u.slice(i);
        if (r1 > r0) {
            Eigen::HouseholderQR<Matrix> qr(m.leftCols(r0));
            Matrix q = qr.householderQ();
            m.rightCols(r1 - r0) = q.middleCols(r0, r1 - r0);
        }
        cores.push_back(TTCore::from_left_unfolding(std::move(m), l1, n));
    }
    return NTTPoint::from_left_orthogonal(TTTensor(std::move(cores), Orthogonality::at(d - 1, d)),
                                          x.effective_ranks());
}

// ---------------------------------------------------------------- tangents

NTTTangent& NTTTangent::operator+=(const NTTTangent& o) {
    require_same_base(*this, o);
    for (std::size_t k = 0; k < params.size(); ++k) params[k] += o.params[k];
    return *this;
}

NTTTangent& NTTTangent::operator-=(const NTTTangent& o) {
    require_same_base(*this, o);
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= o.params[k];
    return *this;
}

NTTTangent& NTTTangent::operator*=(cplx s) {
    for (auto& p : params) p *= s;
    return *this;
}

NTTTangent operator+(NTTTangent a, const NTTTangent& b) { return a += b; }
NTTTangent operator-(NTTTangent a, const NTTTangent& b) { return a -= b; }
NTTTangent operator*(cplx s, NTTTangent a) { return a *= s; }
NTTTangent operator-(NTTTangent a) { return a *= -1.0; }

NTTTangent zero_tangent(const PointPtr& x) {
    NTTTangent v{x, {}};
    for (Index k = 0; k < x->order(); ++k)
        v.params.push_back(Matrix::Zero(x->u(k).left_unfolding().rows(), x->u(k).right_rank()));
    return v;
}

NTTTangent project_tangent(const PointPtr& x, const AmbientVector& z) {
    const NTTPoint& p = *x;
    require_point_shape(p, ambient_shape(z));
    std::vector<Matrix> m = std::visit(
        [&](const auto& a) -> std::vector<Matrix> {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, DenseTensor>) return contract_dense(p, a);
            else if constexpr (std::is_same_v<T, TTTensor>) return contract_tt(p, a);
            else return contract_sparse(p, a);
        },
        z);
    for (Index k = 0; k < p.order(); ++k) {
        const Matrix& lu = p.u(k).left_unfolding();
        auto& w = m[static_cast<std::size_t>(k)];
        // second pass scrubs what roundoff leaves of the gauge
        for (int pass = 0; pass < 2; ++pass) w -= lu * (lu.adjoint() * w);
    }
    return NTTTangent{x, std::move(m)};
}

TTTensor tangent_to_tt(const NTTTangent& v) {
    const NTTPoint& p = *v.base;
    if (p.order() == 1) {
        return TTTensor({TTCore::from_left_unfolding(v.params[0], 1, p.u(0).mode_size())});
    }
    return block_tensor(p, v.params, 1.0, false);
}

NTTPoint retract(const NTTPoint& x, const NTTTangent& v, double s) {
    if (!std::isfinite(s)) throw DomainError("retraction step must be finite");
    if (s == 0.0) return x;
    const Index d = x.order();
    TTTensor sum = d == 1 ? TTTensor({TTCore::from_left_unfolding(x.u(0).left_unfolding() + s * v.params[0], 1,
                                                                  x.u(0).mode_size())})
                          : block_tensor(x, v.params, s, true);
    return ntt_svd(sum, x.ranks(), RankPolicy::Lenient);
}

NTTTangent vector_transport(const PointPtr& y, const NTTTangent& v) {
    if (v.base.get() == y.get()) return v;
    return project_tangent(y, tangent_to_tt(v));
}

cplx tangent_inner(const NTTTangent& v, const NTTTangent& w) {
    require_same_base(v, w);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < v.params.size(); ++k) acc += (v.params[k].conjugate().cwiseProduct(w.params[k])).sum();
    return acc;
}

double tangent_norm(const NTTTangent& v) {
    double acc = 0.0;
    for (const auto& p : v.params) acc += p.squaredNorm();
    return std::sqrt(acc);
}

std::vector<NTTTangent> tangent_basis(const PointPtr& x) {
    const NTTPoint& p = *x;
    std::vector<NTTTangent> basis;
    const NTTTangent zero = zero_tangent(x);
    for (Index k = 0; k < p.order(); ++k) {
        const Matrix& lu = p.u(k).left_unfolding();
        const Index m = lu.rows(), r = lu.cols();
        Eigen::HouseholderQR<Matrix> qr(lu);
        const Matrix q = qr.householderQ();
        for (Index j = r; j < m; ++j) {
            for (Index beta = 0; beta < r; ++beta) {
                for (cplx unit : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
                    NTTTangent v = zero;
                    v.params[static_cast<std::size_t>(k)].col(beta) = unit * q.col(j);
                    basis.push_back(std::move(v));
                }
            }
        }
    }
    return basis;
}

Index manifold_dim(const Shape& shape, const TTRank& r) {
    require_feasible(shape, r);
    const Index d = static_cast<Index>(shape.size());
    Index dim = 0;
    for (Index k = 1; k <= d; ++k) dim += r[k - 1] * shape[static_cast<std::size_t>(k - 1)] * r[k];
    for (Index k = 1; k < d; ++k) dim -= r[k] * r[k];
    return dim - 1;
}

NTTTangent fd_gradient(const PointPtr& x, const CostFunction& f, double t) {
    const double f0 = f(*x);
    if (!std::isfinite(f0)) throw NumericalError("cost is not finite at the base point");
    if (t <= 0.0) t = 1e-5 * std::max(1.0, std::abs(f0));
    NTTTangent g = zero_tangent(x);
    for (const auto& v : tangent_basis(x)) {
        const double fj = f(retract(*x, v, t));
        if (!std::isfinite(fj)) throw NumericalError("cost is not finite along a basis direction");
        const double alpha = (fj - f0) / t;
        for (std::size_t k = 0; k < g.params.size(); ++k) g.params[k] += alpha * v.params[k];
    }
    return g;
}

} // namespace nttkit
