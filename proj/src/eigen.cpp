#include "nttkit/eigen.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>
#include <spdlog/spdlog.h>

namespace nttkit {

namespace {

FactorHint classify(const Matrix& m) {
    if (m.rows() == m.cols() && m == Matrix::Identity(m.rows(), m.cols())) return FactorHint::Identity;
    Matrix off = m;
    off.diagonal().setZero();
    if (m.rows() == m.cols() && off.isZero(0.0)) return FactorHint::Diagonal;
    return FactorHint::Dense;
}

std::vector<Index> support(const KroneckerSumOperator& h, Index l) {
    std::vector<Index> s;
    for (Index k = 0; k < h.order(); ++k)
        if (h.hint(l, k) != FactorHint::Identity) s.push_back(k);
    return s;
}

Matrix pauli_z() {
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
}

Matrix pauli_x() {
    Matrix x = Matrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    return x;
}

// Left transfer: U^H (E (x) applied) U', with U' = U x_2 M.
Matrix left_transfer(const Matrix& e, const TTCore& u, const TTCore& up) {
    Matrix t = e * up.right_unfolding();
    Eigen::Map<const Matrix> tl(t.data(), u.left_rank() * u.mode_size(), up.right_rank());
    return u.left_unfolding().adjoint() * tl;
}

Matrix right_transfer(const Matrix& e, const TTCore& y, const TTCore& yp) {
    Matrix acc = Matrix::Zero(y.left_rank(), yp.left_rank());
    for (Index i = 0; i < y.mode_size(); ++i) acc.noalias() += y.slice(i).conjugate() * e * yp.slice(i).transpose();
    return acc;
}

} // namespace

KroneckerSumOperator::KroneckerSumOperator(std::vector<std::vector<Matrix>> terms, bool hermitian)
    : terms_(std::move(terms)), hermitian_(hermitian) {
    if (terms_.empty()) throw ShapeError("operator needs at least one term");
    const std::size_t d = terms_.front().size();
    if (d == 0) throw ShapeError("operator terms need at least one factor");
    for (const auto& m : terms_.front()) {
        if (m.rows() != m.cols() || m.rows() < 1) throw ShapeError("operator factors must be square");
        shape_.push_back(m.rows());
    }
    for (const auto& t : terms_) {
        if (t.size() != d) throw ShapeError("all operator terms need the same number of factors");
        std::vector<FactorHint> h;
        for (std::size_t k = 0; k < d; ++k) {
            if (t[k].rows() != shape_[k] || t[k].cols() != shape_[k]) {
                throw ShapeError("factor " + std::to_string(k + 1) + " has inconsistent size");
            }
            if (hermitian_ && (t[k] - t[k].adjoint()).norm() > 1e-12 * std::max(1.0, t[k].norm())) {
                throw DomainError("operator flagged Hermitian has a non-Hermitian factor");
            }
            h.push_back(classify(t[k]));
        }
        hints_.push_back(std::move(h));
    }
}

bool KroneckerSumOperator::local() const {
    for (Index l = 0; l < term_count(); ++l) {
        const auto s = support(*this, l);
        if (s.size() > 2) return false;
        if (s.size() == 2 && s[1] != s[0] + 1) return false;
    }
    return true;
}

Matrix KroneckerSumOperator::dense(Index guard) const {
    const Index n = checked_shape_size(shape_, guard);
    Matrix out = Matrix::Zero(n, n);
    for (const auto& t : terms_) {
        Matrix acc = t[0];
        for (std::size_t k = 1; k < t.size(); ++k) {
            Matrix next = Eigen::kroneckerProduct(t[k], acc);
            acc = std::move(next);
        }
        out += acc;
    }
    return out;
}

KroneckerSumOperator laplace_operator(Index d, Index n) {
    if (d < 1 || n < 2) throw DomainError("laplace_operator needs d >= 1 and n >= 2");
    Matrix t = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        t(i, i) = 2.0;
        if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = -1.0;
    }
    std::vector<std::vector<Matrix>> terms;
    for (Index l = 0; l < d; ++l) {
        std::vector<Matrix> f(static_cast<std::size_t>(d), Matrix::Identity(n, n));
        f[static_cast<std::size_t>(l)] = t;
        terms.push_back(std::move(f));
    }
    return KroneckerSumOperator(std::move(terms), true);
}

KroneckerSumOperator ising_operator(Index d, double t) {
    if (d < 2) throw DomainError("ising_operator needs d >= 2");
    const Matrix id = Matrix::Identity(2, 2);
    std::vector<std::vector<Matrix>> terms;
    for (Index k = 0; k + 1 < d; ++k) {
        std::vector<Matrix> f(static_cast<std::size_t>(d), id);
        // the minus sign sits on one factor only, so the product is -Z Z
        f[static_cast<std::size_t>(k)] = -pauli_z();
        f[static_cast<std::size_t>(k + 1)] = pauli_z();
        terms.push_back(std::move(f));
    }
    for (Index k = 0; k < d; ++k) {
        std::vector<Matrix> f(static_cast<std::size_t>(d), id);
        f[static_cast<std::size_t>(k)] = -t * pauli_x();
        terms.push_back(std::move(f));
    }
    return KroneckerSumOperator(std::move(terms), true);
}

TTTensor apply_operator_naive(const KroneckerSumOperator& h, const TTTensor& x) {
    if (x.shape() != h.shape()) throw ShapeError("operator and tensor shapes differ");
    TTTensor acc = kron_apply(x, h.term(0));
    for (Index l = 1; l < h.term_count(); ++l) acc = tt_add(acc, kron_apply(x, h.term(l)));
    return acc;
}

TTTensor apply_operator(const KroneckerSumOperator& h, const TTTensor& x) {
    if (x.shape() != h.shape()) throw ShapeError("operator and tensor shapes differ");
    if (!h.local()) return apply_operator_naive(h, x);
    const Index d = x.order();

    // Automaton states per bond: 0 = nothing applied yet, 1 = term complete,
    // 2 + j = the j-th two-site term crossing that bond is half applied.
    std::vector<std::vector<Index>> pending(static_cast<std::size_t>(d + 1));
    std::vector<Index> start_site(static_cast<std::size_t>(h.term_count()), -1);
    std::vector<Index> one_site(static_cast<std::size_t>(h.term_count()), -1);
    for (Index l = 0; l < h.term_count(); ++l) {
        const auto s = support(h, l);
        if (s.size() == 2) {
            start_site[static_cast<std::size_t>(l)] = s[0];
            pending[static_cast<std::size_t>(s[1])].push_back(l);
        } else {
            one_site[static_cast<std::size_t>(l)] = s.empty() ? 0 : s[0];
        }
    }
    auto states = [&](Index bond) {
        std::vector<Index> st;
        if (bond < d) st.push_back(0);
        if (bond > 0) st.push_back(1);
        if (bond > 0 && bond < d)
            for (std::size_t j = 0; j < pending[static_cast<std::size_t>(bond)].size(); ++j)
                st.push_back(2 + static_cast<Index>(j));
        return st;
    };
    auto pending_state = [&](Index bond, Index l) {
        const auto& p = pending[static_cast<std::size_t>(bond)];
        return 2 + static_cast<Index>(std::find(p.begin(), p.end(), l) - p.begin());
    };

    std::vector<TTCore> cores;
    for (Index k = 0; k < d; ++k) {
        const auto& u = x.core(k);
        const Index n = u.mode_size(), rl = u.left_rank(), rr = u.right_rank();
        const auto ls = states(k), rs = states(k + 1);
        std::map<std::pair<Index, Index>, Matrix> ops;
        auto add = [&](Index a, Index b, const Matrix& m) {
            auto [it, fresh] = ops.try_emplace({a, b}, m);
            if (!fresh) it->second += m;
        };
        add(0, 0, Matrix::Identity(n, n));
        add(1, 1, Matrix::Identity(n, n));
        for (Index l = 0; l < h.term_count(); ++l) {
            if (one_site[static_cast<std::size_t>(l)] == k) add(0, 1, h.factor(l, k));
            if (start_site[static_cast<std::size_t>(l)] == k) add(0, pending_state(k + 1, l), h.factor(l, k));
            if (start_site[static_cast<std::size_t>(l)] == k - 1) add(pending_state(k, l), 1, h.factor(l, k));
        }
        auto pos = [](const std::vector<Index>& st, Index s) -> Index {
            auto it = std::find(st.begin(), st.end(), s);
            return it == st.end() ? -1 : static_cast<Index>(it - st.begin());
        };
        TTCore g(static_cast<Index>(ls.size()) * rl, n, static_cast<Index>(rs.size()) * rr);
        for (const auto& [ab, m] : ops) {
            const Index a = pos(ls, ab.first), b = pos(rs, ab.second);
            if (a < 0 || b < 0) continue;
            const TTCore c = core_mode_product(u, m);
            for (Index i = 0; i < n; ++i) g.slice(i).block(a * rl, b * rr, rl, rr) += c.slice(i);
        }
        cores.push_back(std::move(g));
    }
    return TTTensor(std::move(cores));
}

double rayleigh(const KroneckerSumOperator& h, const NTTPoint& x) {
    if (!h.hermitian()) throw DomainError("Rayleigh quotient needs a Hermitian operator");
    return tt_inner(x.left(), apply_operator(h, x.left())).real();
}

Objective rayleigh_objective(std::shared_ptr<const KroneckerSumOperator> h, Extremum e) {
    if (!h->hermitian()) throw DomainError("Rayleigh quotient needs a Hermitian operator");
    const double sign = e == Extremum::Min ? 1.0 : -1.0;
    Objective o;
    o.cost = [h, sign](const NTTPoint& x) { return sign * rayleigh(*h, x); };
    o.grad = [h, sign](const PointPtr& x) {
        return project_tangent(x, tt_scale(apply_operator(*h, x->left()), 2.0 * sign));
    };
    o.model_step = [h, sign](const PointPtr& x, const NTTTangent& v) -> std::optional<double> {
        // minimizer of (a + 2bs + cs^2) / (1 + vv s^2), V orthogonal to X
        const TTTensor vt = tangent_to_tt(v);
        const TTTensor hx = apply_operator(*h, x->left());
        const double a = sign * tt_inner(x->left(), hx).real();
        const double b = sign * tt_inner(vt, hx).real();
        const double c = sign * tt_inner(vt, apply_operator(*h, vt)).real();
        const double vv = std::pow(tangent_norm(v), 2);
        if (!(b < 0.0) || vv <= 0.0) return std::nullopt;
        const double q = c - a * vv;
        return -2.0 * b / (q + std::sqrt(q * q + 4.0 * b * b * vv));
    };
    return o;
}

EigenResult eigen_solve(std::shared_ptr<const KroneckerSumOperator> h, const std::vector<TTRank>& schedule,
                        Extremum e, const RCGConfig& cfg, std::uint64_t seed, Index stage_iters) {
    if (schedule.empty()) throw RankError("eigen_solve needs at least one rank");
    const double sign = e == Extremum::Min ? 1.0 : -1.0;
    const NTTPoint x0 = random_point(h->shape(), schedule.front(), seed, Field::Real);
    const Objective obj = rayleigh_objective(h, e);
    EigenResult out;
    out.trace = schedule.size() == 1 ? rcg_minimize(obj, x0, cfg) : rank_continuation(obj, x0, schedule, stage_iters, cfg);
    if (out.trace.stage_ends.empty()) out.trace.stage_ends.push_back(out.trace.rows.size() - 1);
    for (std::size_t idx : out.trace.stage_ends) out.stage_lambdas.push_back(sign * out.trace.rows[idx].cost);
    out.point = out.trace.final_point;
    out.lambda = rayleigh(*h, *out.point);
    return out;
}

std::pair<double, TTTensor> laplace_reference(Index d, Index n, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != d) throw ShapeError("laplace_reference needs d indices");
    const double pi = std::numbers::pi;
    double lambda = 0.0;
    std::vector<Vector> factors;
    for (Index i : idx) {
        if (i < 1 || i > n) throw ShapeError("laplace_reference index out of range");
        const double s = std::sin(static_cast<double>(i) * pi / (2.0 * static_cast<double>(n + 1)));
        lambda += 4.0 * s * s;
        Vector v(n);
        for (Index j = 1; j <= n; ++j) v[j - 1] = std::sin(static_cast<double>(i * j) * pi / static_cast<double>(n + 1));
        factors.push_back(v / v.norm());
    }
    return {lambda, TTTensor::rank_one(factors)};
}

double subspace_distance(const NTTPoint& x, const TTTensor& v) {
    const double ip = std::abs(tt_inner(x.left(), v));
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * ip * ip));
}

ALSResult als_baseline(const KroneckerSumOperator& h, const TTRank& rank, Index sweeps, std::uint64_t seed, Extremum e) {
    if (!h.hermitian()) throw DomainError("ALS needs a Hermitian operator");
    const Shape shape = h.shape();
    const Index d = h.order();
    const Index nterms = h.term_count();
    const TTRank r = clamp_ranks(shape, rank);
    const NTTPoint x0 = random_point(shape, r, seed, Field::Real);
    std::vector<TTCore> cores = x0.right().cores();

    using Envs = std::vector<std::vector<Matrix>>;  // [term][bond]
    Envs lenv(static_cast<std::size_t>(nterms), std::vector<Matrix>(static_cast<std::size_t>(d + 1)));
    Envs renv = lenv;
    for (Index l = 0; l < nterms; ++l) {
        lenv[l][0] = Matrix::Ones(1, 1);
        renv[l][static_cast<std::size_t>(d)] = Matrix::Ones(1, 1);
        for (Index k = d - 1; k >= 1; --k) {
            const auto& y = cores[static_cast<std::size_t>(k)];
            renv[l][static_cast<std::size_t>(k)] =
                right_transfer(renv[l][static_cast<std::size_t>(k + 1)], y, core_mode_product(y, h.factor(l, k)));
        }
    }

    ALSResult out;
    auto solve = [&](Index k) {
        const auto& c = cores[static_cast<std::size_t>(k)];
        const Index dim = c.left_unfolding().size();
        Matrix loc = Matrix::Zero(dim, dim);
        for (Index l = 0; l < nterms; ++l) {
            loc += Eigen::kroneckerProduct(renv[l][static_cast<std::size_t>(k + 1)],
                                           Eigen::kroneckerProduct(h.factor(l, k), lenv[l][static_cast<std::size_t>(k)]).eval())
                       .eval();
        }
        loc = 0.5 * (loc + loc.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(loc);
        if (es.info() != Eigen::Success) throw NumericalError("local eigensolve failed at site " + std::to_string(k + 1));
        const Index pick = e == Extremum::Min ? 0 : dim - 1;
        out.trace.push_back(es.eigenvalues()[pick]);
        Matrix vec = es.eigenvectors().col(pick);
        cores[static_cast<std::size_t>(k)] =
            TTCore::from_left_unfolding(Eigen::Map<const Matrix>(vec.data(), c.left_rank() * c.mode_size(), c.right_rank()),
                                        c.left_rank(), c.mode_size());
    };

    for (Index sweep = 0; sweep < sweeps; ++sweep) {
        for (Index k = 0; k < d; ++k) {
            solve(k);
            if (k + 1 == d) break;
            auto& c = cores[static_cast<std::size_t>(k)];
            Eigen::HouseholderQR<Matrix> qr(c.left_unfolding());
            const Index m = c.right_rank();
            Matrix q = qr.householderQ() * Matrix::Identity(c.left_unfolding().rows(), m);
            Matrix rr = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
            c = TTCore::from_left_unfolding(std::move(q), c.left_rank(), c.mode_size());
            auto& next = cores[static_cast<std::size_t>(k + 1)];
            next = TTCore::from_right_unfolding(rr * next.right_unfolding(), next.mode_size(), next.right_rank());
            for (Index l = 0; l < nterms; ++l)
                lenv[l][static_cast<std::size_t>(k + 1)] =
                    left_transfer(lenv[l][static_cast<std::size_t>(k)], c, core_mode_product(c, h.factor(l, k)));
        }
        for (Index k = d - 1; k >= 0; --k) {
            if (k != d - 1) solve(k);
            if (k == 0) break;
            auto& c = cores[static_cast<std::size_t>(k)];
            Eigen::HouseholderQR<Matrix> qr(c.right_unfolding().adjoint());
            const Index m = c.left_rank();
            Matrix q = qr.householderQ() * Matrix::Identity(c.right_unfolding().cols(), m);
            Matrix rr = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
            c = TTCore::from_right_unfolding(q.adjoint(), c.mode_size(), c.right_rank());
            auto& prev = cores[static_cast<std::size_t>(k - 1)];
            prev = TTCore::from_left_unfolding(prev.left_unfolding() * rr.adjoint(), prev.left_rank(), prev.mode_size());
            for (Index l = 0; l < nterms; ++l)
                renv[l][static_cast<std::size_t>(k)] =
                    right_transfer(renv[l][static_cast<std::size_t>(k + 1)], c, core_mode_product(c, h.factor(l, k)));
        }
        spdlog::debug("als: sweep {} lambda {:.12e}", sweep + 1, out.trace.back());
    }
    out.point = make_point(ntt_svd(TTTensor(std::move(cores)), r, RankPolicy::Lenient));
    out.lambda = rayleigh(h, *out.point);
    return out;
}

} // namespace nttkit
