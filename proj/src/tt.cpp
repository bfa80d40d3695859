#include "nttkit/tt.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace nttkit {

namespace {

Index saturating_mul(Index a, Index b) {
    constexpr Index cap = std::numeric_limits<Index>::max() / 4;
    if (a != 0 && b > cap / a) return cap;
    return a * b;
}

void require_same_shape(const TTTensor& x, const TTTensor& y, const char* what) {
    if (x.shape() != y.shape()) {
        throw ShapeError(std::string(what) + ": shapes " + shape_to_string(x.shape()) + " and " +
                         shape_to_string(y.shape()) + " differ");
    }
}

struct ThinQR {
    Matrix q;
    Matrix r;
};

// A = Q R with Q having min(rows, cols) orthonormal columns.
ThinQR thin_qr(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    const Index m = std::min(a.rows(), a.cols());
    ThinQR out;
    out.q = qr.householderQ() * Matrix::Identity(a.rows(), m);
    out.r = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
    return out;
}

struct Truncation {
    Matrix u;      // kept left singular vectors
    Matrix carry;  // diag(s) V^H, kept rows
    Index effective = 0;
    double discarded = 0.0;
};

Truncation truncate(const Matrix& c, Index keep) {
    Eigen::BDCSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const Index avail = s.size();
    keep = std::min(keep, avail);
    Truncation t;
    const double smax = avail > 0 ? s[0] : 0.0;
    for (Index i = 0; i < avail; ++i)
        if (s[i] > kRankTolerance * smax && s[i] > 0.0) ++t.effective;
    t.effective = std::min(t.effective, keep);
    if (keep < avail) t.discarded = s.tail(avail - keep).norm();
    t.u = svd.matrixU().leftCols(keep);
    t.carry = s.head(keep).cast<cplx>().asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    return t;
}

} // namespace

// ---------------------------------------------------------------- ranks

TTRank::TTRank(std::vector<Index> values) : r_(std::move(values)) {
    if (r_.size() < 2) throw RankError("rank array needs at least two entries");
    if (r_.front() != 1 || r_.back() != 1) throw RankError("boundary ranks must be 1, got " + to_string());
    for (Index v : r_)
        if (v < 1) throw RankError("ranks must be positive, got " + to_string());
}

TTRank TTRank::ones(Index d) { return TTRank(std::vector<Index>(static_cast<std::size_t>(d + 1), 1)); }

TTRank TTRank::uniform(Index d, Index r) {
    std::vector<Index> v(static_cast<std::size_t>(d + 1), r);
    v.front() = v.back() = 1;
    return TTRank(std::move(v));
}

Index TTRank::max() const { return *std::max_element(r_.begin(), r_.end()); }

std::string TTRank::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < r_.size(); ++i) os << (i ? "," : "") << r_[i];
    os << ')';
    return os.str();
}

TTRank max_ranks(const Shape& shape) {
    const std::size_t d = shape.size();
    std::vector<Index> left(d + 1, 1), right(d + 1, 1);
    for (std::size_t k = 1; k <= d; ++k) left[k] = saturating_mul(left[k - 1], shape[k - 1]);
    for (std::size_t k = d; k-- > 0;) right[k] = saturating_mul(right[k + 1], shape[k]);
    std::vector<Index> r(d + 1);
    for (std::size_t k = 0; k <= d; ++k) r[k] = std::min(left[k], right[k]);
    return TTRank(std::move(r));
}

bool is_feasible(const Shape& shape, const TTRank& r) {
    const Index d = static_cast<Index>(shape.size());
    if (r.order() != d) return false;
    // Adjacent conditions imply the product bounds, and also rule out the
    // combinations that no exact-rank tensor can realize.
    for (Index k = 1; k <= d; ++k) {
        const Index n = shape[static_cast<std::size_t>(k - 1)];
        if (r[k] > saturating_mul(r[k - 1], n)) return false;
        if (r[k - 1] > saturating_mul(n, r[k])) return false;
    }
    return true;
}

void require_feasible(const Shape& shape, const TTRank& r) {
    if (r.order() != static_cast<Index>(shape.size())) {
        throw RankError("rank " + r.to_string() + " does not match order of shape " + shape_to_string(shape));
    }
    if (!is_feasible(shape, r)) {
        throw RankError("rank " + r.to_string() + " is infeasible for shape " + shape_to_string(shape));
    }
}

TTRank clamp_ranks(const Shape& shape, const TTRank& r) {
    const std::size_t d = shape.size();
    if (r.order() != static_cast<Index>(d)) throw RankError("rank/shape order mismatch");
    std::vector<Index> v = r.values();
    for (std::size_t k = 1; k <= d; ++k) v[k] = std::min(v[k], saturating_mul(v[k - 1], shape[k - 1]));
    for (std::size_t k = d; k >= 1; --k) v[k - 1] = std::min(v[k - 1], saturating_mul(shape[k - 1], v[k]));
    return TTRank(std::move(v));
}

// ---------------------------------------------------------------- cores

TTCore::TTCore(Index left, Index size, Index right)
    : left_(left), size_(size), right_(right), data_(Matrix::Zero(left * size, right)) {
    if (left < 1 || size < 1 || right < 1) throw ShapeError("core dimensions must be positive");
}

TTCore TTCore::from_left_unfolding(Matrix unfolding, Index left, Index size) {
    if (left < 1 || size < 1 || unfolding.rows() != left * size || unfolding.cols() < 1) {
        throw ShapeError("left unfolding of size " + std::to_string(unfolding.rows()) + "x" +
                         std::to_string(unfolding.cols()) + " does not fit " + std::to_string(left) + "x" +
                         std::to_string(size) + "xr");
    }
    TTCore c;
    c.left_ = left;
    c.size_ = size;
    c.right_ = unfolding.cols();
    c.data_ = std::move(unfolding);
    return c;
}

TTCore TTCore::from_right_unfolding(const Matrix& unfolding, Index size, Index right) {
    if (size < 1 || right < 1 || unfolding.cols() != size * right || unfolding.rows() < 1) {
        throw ShapeError("right unfolding does not fit the requested core shape");
    }
    Matrix l = Eigen::Map<const Matrix>(unfolding.data(), unfolding.rows() * size, right);
    return from_left_unfolding(std::move(l), unfolding.rows(), size);
}

Orthogonality Orthogonality::at(Index center, Index order) {
    Orthogonality o;
    o.center = center;
    if (center == order - 1) o.kind = Kind::Left;
    else if (center == 0) o.kind = Kind::Right;
    else o.kind = Kind::Center;
    return o;
}

std::string to_string(Orthogonality orth) {
    switch (orth.kind) {
    case Orthogonality::Kind::None: return "none";
    case Orthogonality::Kind::Left: return "left";
    case Orthogonality::Kind::Right: return "right";
    case Orthogonality::Kind::Center: return "center:" + std::to_string(orth.center);
    }
    return "none";
}

// ---------------------------------------------------------------- tensors

TTTensor::TTTensor(std::vector<TTCore> cores, Orthogonality orth) : cores_(std::move(cores)), orth_(orth) {
    if (cores_.empty()) throw ShapeError("tensor train needs at least one core");
    if (cores_.front().left_rank() != 1 || cores_.back().right_rank() != 1) {
        throw RankError("boundary ranks of a tensor train must be 1");
    }
    for (std::size_t k = 1; k < cores_.size(); ++k) {
        if (cores_[k - 1].right_rank() != cores_[k].left_rank()) {
            throw RankError("bond mismatch between cores " + std::to_string(k) + " and " + std::to_string(k + 1));
        }
    }
    if (orth_.kind != Orthogonality::Kind::None && (orth_.center < 0 || orth_.center >= order())) {
        throw ShapeError("orthogonality center out of range");
    }
}

Shape TTTensor::shape() const {
    Shape s;
    s.reserve(cores_.size());
    for (const auto& c : cores_) s.push_back(c.mode_size());
    return s;
}

TTRank TTTensor::ranks() const {
    std::vector<Index> r{1};
    for (const auto& c : cores_) r.push_back(c.right_rank());
    return TTRank(std::move(r));
}

Index TTTensor::parameter_count() const {
    Index n = 0;
    for (const auto& c : cores_) n += c.left_unfolding().size();
    return n;
}

TTTensor TTTensor::rank_one(std::span<const Vector> factors) {
    std::vector<TTCore> cores;
    for (const auto& f : factors) cores.push_back(TTCore::from_left_unfolding(Matrix(f), 1, f.size()));
    return TTTensor(std::move(cores));
}

TTTensor TTTensor::zeros(const Shape& shape) {
    std::vector<TTCore> cores;
    for (Index n : shape) cores.emplace_back(1, n, 1);
    return TTTensor(std::move(cores));
}

TTTensor TTTensor::random(const Shape& shape, const TTRank& ranks, Rng& rng, Field field) {
    if (ranks.order() != static_cast<Index>(shape.size())) throw RankError("rank/shape order mismatch");
    std::vector<TTCore> cores;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        const Index k1 = static_cast<Index>(k);
        cores.push_back(TTCore::from_left_unfolding(
            gaussian_matrix(ranks[k1] * shape[k], ranks[k1 + 1], rng, field), ranks[k1], shape[k]));
    }
    return TTTensor(std::move(cores));
}

bool TruncationReport::rank_deficient(const TTRank& requested) const {
    for (std::size_t k = 0; k < effective_ranks.size() && k < requested.values().size(); ++k)
        if (effective_ranks[k] < requested.values()[k]) return true;
    return false;
}

// ---------------------------------------------------------------- evaluation

cplx tt_entry(const TTTensor& x, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != x.order()) throw ShapeError("multi-index has wrong length");
    Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(1);
    for (Index k = 0; k < x.order(); ++k) {
        const auto& c = x.core(k);
        const Index i = idx[static_cast<std::size_t>(k)];
        if (i < 0 || i >= c.mode_size()) throw ShapeError("multi-index out of range");
        v = v * c.slice(i);
    }
    return v(0);
}

DenseTensor tt_full(const TTTensor& x, Index guard) {
    const Shape shape = x.shape();
    checked_shape_size(shape, guard);
    // rows: leading modes (first fastest), cols: current bond
    Matrix acc = Matrix::Ones(1, 1);
    for (Index k = 0; k < x.order(); ++k) {
        const auto& c = x.core(k);
        const Index rows = acc.rows();
        Matrix next(rows * c.mode_size(), c.right_rank());
        for (Index i = 0; i < c.mode_size(); ++i) next.middleRows(i * rows, rows).noalias() = acc * c.slice(i);
        acc = std::move(next);
    }
    return DenseTensor(shape, Eigen::Map<const Vector>(acc.data(), acc.rows()));
}

TTTensor tt_svd(const DenseTensor& a, const TTRank& r, TruncationReport* report) {
    const Shape& shape = a.shape();
    const Index d = a.order();
    require_feasible(shape, r);
    TruncationReport rep;
    rep.effective_ranks.assign(static_cast<std::size_t>(d + 1), 1);
    rep.discarded.assign(static_cast<std::size_t>(d + 1), 0.0);

    std::vector<TTCore> cores;
    Matrix c = Eigen::Map<const Matrix>(a.data().data(), shape[0], a.size() / shape[0]);
    Index left = 1;
    for (Index k = 0; k + 1 < d; ++k) {
        const Index n = shape[static_cast<std::size_t>(k)];
        Truncation t = truncate(c, r[k + 1]);
        rep.effective_ranks[static_cast<std::size_t>(k + 1)] = t.effective;
        rep.discarded[static_cast<std::size_t>(k + 1)] = t.discarded;
        const Index keep = t.u.cols();
        cores.push_back(TTCore::from_left_unfolding(std::move(t.u), left, n));
        const Index nn = shape[static_cast<std::size_t>(k + 1)];
        c = Eigen::Map<const Matrix>(t.carry.data(), keep * nn, t.carry.size() / (keep * nn));
        left = keep;
    }
    cores.push_back(TTCore::from_left_unfolding(std::move(c), left, shape.back()));
    if (report) *report = std::move(rep);
    return TTTensor(std::move(cores), Orthogonality::at(d - 1, d));
}

TTTensor orthogonalize(const TTTensor& x, Index center) {
    const Index d = x.order();
    if (center < 0 || center >= d) throw ShapeError("orthogonality center out of range");
    std::vector<TTCore> cores = x.cores();

    for (Index k = 0; k < center; ++k) {
        auto& c = cores[static_cast<std::size_t>(k)];
        ThinQR f = thin_qr(c.left_unfolding());
        c = TTCore::from_left_unfolding(std::move(f.q), c.left_rank(), c.mode_size());
        auto& next = cores[static_cast<std::size_t>(k + 1)];
        Matrix r = f.r * next.right_unfolding();
        next = TTCore::from_right_unfolding(r, next.mode_size(), next.right_rank());
    }
    for (Index k = d - 1; k > center; --k) {
        auto& c = cores[static_cast<std::size_t>(k)];
        // LQ of R(U) through QR of its adjoint
        ThinQR f = thin_qr(c.right_unfolding().adjoint());
        Matrix q = f.q.adjoint();
        const Index n = c.mode_size(), right = c.right_rank();
        c = TTCore::from_right_unfolding(q, n, right);
        auto& prev = cores[static_cast<std::size_t>(k - 1)];
        Matrix l = prev.left_unfolding() * f.r.adjoint();
        prev = TTCore::from_left_unfolding(std::move(l), prev.left_rank(), prev.mode_size());
    }
    return TTTensor(std::move(cores), Orthogonality::at(center, d));
}

double tt_norm(const TTTensor& x) {
    const auto o = x.orthogonality();
    if (o.kind != Orthogonality::Kind::None) return x.core(o.center).norm();
    const Index d = x.order();
    return orthogonalize(x, d - 1).core(d - 1).norm();
}

cplx tt_inner(const TTTensor& x, const TTTensor& y) {
    require_same_shape(x, y, "tt_inner");
    Matrix e = Matrix::Ones(1, 1);
    for (Index k = 0; k < x.order(); ++k) {
        const auto& u = x.core(k);
        const auto& v = y.core(k);
        // E V(i) for all i at once, then reshaped so that rows run over (a, i)
        Matrix ev = e * v.right_unfolding();
        Eigen::Map<const Matrix> evl(ev.data(), u.left_rank() * u.mode_size(), v.right_rank());
        e = u.left_unfolding().adjoint() * evl;
    }
    return e(0, 0);
}

TTTensor tt_add(const TTTensor& x, const TTTensor& y) {
    require_same_shape(x, y, "tt_add");
    const Index d = x.order();
    if (d == 1) {
        return TTTensor({TTCore::from_left_unfolding(x.core(0).left_unfolding() + y.core(0).left_unfolding(), 1,
                                                     x.core(0).mode_size())});
    }
    std::vector<TTCore> cores;
    for (Index k = 0; k < d; ++k) {
        const auto& u = x.core(k);
        const auto& v = y.core(k);
        const Index n = u.mode_size();
        const Index l = k == 0 ? 1 : u.left_rank() + v.left_rank();
        const Index r = k == d - 1 ? 1 : u.right_rank() + v.right_rank();
        TTCore c(l, n, r);
        for (Index i = 0; i < n; ++i) {
            auto s = c.slice(i);
            if (k == 0) {
                s.leftCols(u.right_rank()) = u.slice(i);
                s.rightCols(v.right_rank()) = v.slice(i);
            } else if (k == d - 1) {
                s.topRows(u.left_rank()) = u.slice(i);
                s.bottomRows(v.left_rank()) = v.slice(i);
            } else {
                s.topLeftCorner(u.left_rank(), u.right_rank()) = u.slice(i);
                s.bottomRightCorner(v.left_rank(), v.right_rank()) = v.slice(i);
            }
        }
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTTensor tt_scale(const TTTensor& x, cplx s) {
    std::vector<TTCore> cores = x.cores();
    const auto o = x.orthogonality();
    const Index at = o.kind == Orthogonality::Kind::None ? x.order() - 1 : o.center;
    cores[static_cast<std::size_t>(at)].left_unfolding() *= s;
    return TTTensor(std::move(cores), o);
}

TTTensor tt_round(const TTTensor& x, const TTRank& r, TruncationReport* report) {
    const Shape shape = x.shape();
    require_feasible(shape, r);
    const Index d = x.order();
    TruncationReport rep;
    rep.effective_ranks.assign(static_cast<std::size_t>(d + 1), 1);
    rep.discarded.assign(static_cast<std::size_t>(d + 1), 0.0);
    if (d == 1) {
        if (report) *report = std::move(rep);
        return TTTensor(x.cores(), Orthogonality::at(0, 1));
    }

    // With everything to the right orthonormal, the SVD of each left unfolding
    // is the SVD of the full unfolding, so this reproduces TT-SVD.
    TTTensor y = orthogonalize(x, 0);
    std::vector<TTCore> cores = y.cores();
    Matrix c = cores[0].left_unfolding();
    Index left = 1;
    for (Index k = 0; k + 1 < d; ++k) {
        const Index n = shape[static_cast<std::size_t>(k)];
        Truncation t = truncate(c, r[k + 1]);
        rep.effective_ranks[static_cast<std::size_t>(k + 1)] = t.effective;
        rep.discarded[static_cast<std::size_t>(k + 1)] = t.discarded;
        const Index keep = t.u.cols();
        cores[static_cast<std::size_t>(k)] = TTCore::from_left_unfolding(std::move(t.u), left, n);
        const auto& next = cores[static_cast<std::size_t>(k + 1)];
        Matrix m = t.carry * next.right_unfolding();
        c = Eigen::Map<const Matrix>(m.data(), keep * next.mode_size(), next.right_rank());
        left = keep;
    }
    cores[static_cast<std::size_t>(d - 1)] = TTCore::from_left_unfolding(std::move(c), left, shape.back());
    if (report) *report = std::move(rep);
    return TTTensor(std::move(cores), Orthogonality::at(d - 1, d));
}

std::pair<Matrix, Matrix> interface(const TTTensor& x, Index k, Index guard) {
    const Index d = x.order();
    if (k < 0 || k > d) throw ShapeError("interface index out of range");
    const Shape shape = x.shape();
    checked_shape_size(Shape(shape.begin(), shape.begin() + k), guard);
    checked_shape_size(Shape(shape.begin() + k, shape.end()), guard);

    Matrix le = Matrix::Ones(1, 1);
    for (Index j = 0; j < k; ++j) {
        const auto& c = x.core(j);
        const Index rows = le.rows();
        Matrix next(rows * c.mode_size(), c.right_rank());
        for (Index i = 0; i < c.mode_size(); ++i) next.middleRows(i * rows, rows).noalias() = le * c.slice(i);
        le = std::move(next);
    }

    Matrix ge = Matrix::Ones(1, 1);
    for (Index j = d - 1; j >= k; --j) {
        const auto& c = x.core(j);
        const Index n = c.mode_size();
        const Index rest = ge.rows();
        Matrix next(n * rest, c.left_rank());
        for (Index i = 0; i < n; ++i) {
            Matrix t = ge * c.slice(i).transpose();
            for (Index q = 0; q < rest; ++q) next.row(i + n * q) = t.row(q);
        }
        ge = std::move(next);
    }
    return {std::move(le), std::move(ge)};
}

TTCore core_mode_product(const TTCore& core, const Matrix& k) {
    if (k.cols() != core.mode_size()) {
        throw ShapeError("factor has " + std::to_string(k.cols()) + " columns, mode size is " +
                         std::to_string(core.mode_size()));
    }
    const Index l = core.left_rank(), n = core.mode_size(), r = core.right_rank(), m = k.rows();
    Matrix out(l * m, r);
    const Matrix kt = k.transpose();
    for (Index b = 0; b < r; ++b) {
        Eigen::Map<const Matrix> slab(core.left_unfolding().col(b).data(), l, n);
        Eigen::Map<Matrix> dst(out.col(b).data(), l, m);
        dst.noalias() = slab * kt;
    }
    return TTCore::from_left_unfolding(std::move(out), l, m);
}

TTTensor kron_apply(const TTTensor& x, std::span<const Matrix> factors) {
    if (static_cast<Index>(factors.size()) != x.order()) {
        throw ShapeError("kron_apply needs one factor per mode");
    }
    std::vector<TTCore> cores;
    for (Index k = 0; k < x.order(); ++k)
        cores.push_back(core_mode_product(x.core(k), factors[static_cast<std::size_t>(k)]));
    return TTTensor(std::move(cores));
}

} // namespace nttkit
