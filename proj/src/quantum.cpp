#include "nttkit/quantum.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <spdlog/spdlog.h>

namespace nttkit {

namespace {

constexpr double kNormTolerance = 1e-10;

// T_M = sum_{s,s'} M(s,s') conj(U(s)) (x) U(s')
Matrix site_transfer(const TTCore& u, const Matrix& m) {
    const Index l = u.left_rank(), r = u.right_rank();
    Matrix t = Matrix::Zero(l * l, r * r);
    for (Index s = 0; s < m.rows(); ++s) {
        for (Index sp = 0; sp < m.cols(); ++sp) {
            if (m(s, sp) == cplx(0.0)) continue;
            t += m(s, sp) * Eigen::kroneckerProduct(u.slice(s).conjugate().eval(), u.slice(sp).eval()).eval();
        }
    }
    return t;
}

Matrix ket_bra(Index dim, Index a, Index b) {
    Matrix m = Matrix::Zero(dim, dim);
    m(a, b) = 1.0;
    return m;
}

void require_unit(double norm, const char* what) {
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw DomainError(std::string(what) + " needs a unit-norm state, got norm " + std::to_string(norm));
    }
}

void require_qubits(const Shape& shape) {
    for (Index n : shape)
        if (n != 2) throw ShapeError("expected local dimension 2, got shape " + shape_to_string(shape));
}

// in-place Walsh-Hadamard transform
void walsh_hadamard(std::vector<cplx>& a) {
    for (std::size_t h = 1; h < a.size(); h <<= 1) {
        for (std::size_t i = 0; i < a.size(); i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const cplx x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
    }
}

} // namespace

Matrix pauli_matrix(char label) {
    Matrix m = Matrix::Zero(2, 2);
    switch (label) {
    case 'I': m(0, 0) = m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = m(1, 0) = 1.0; break;
    case 'Y':
        m(0, 1) = cplx(0.0, -1.0);
        m(1, 0) = cplx(0.0, 1.0);
        break;
    case 'Z':
        m(0, 0) = 1.0;
        m(1, 1) = -1.0;
        break;
    default: throw DomainError(std::string("unknown Pauli label '") + label + "'");
    }
    return m;
}

double sre2_dense(const DenseTensor& psi) {
    require_qubits(psi.shape());
    const Index n = psi.order();
    if (n > 12) throw SizeGuardError("sre2_dense enumerates 4^n Pauli strings; n must be at most 12");
    require_unit(psi.norm(), "sre2_dense");
    const std::size_t dim = std::size_t{1} << n;
    const auto& v = psi.data();
    // For each X-mask, the Z-mask sums are a Walsh-Hadamard transform.
    double total = 0.0;
    std::vector<cplx> w(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t j = 0; j < dim; ++j) w[j] = std::conj(v[static_cast<Index>(j ^ x)]) * v[static_cast<Index>(j)];
        walsh_hadamard(w);
        for (const cplx& e : w) total += std::pow(std::norm(e), 2);
    }
    return -std::log2(total) + static_cast<double>(n);
}

double sre2_mps(const TTTensor& phi) {
    require_qubits(phi.shape());
    require_unit(tt_norm(phi), "sre2_mps");
    const char labels[] = {'I', 'X', 'Y', 'Z'};
    DenseTensor v(Shape{1, 1, 1, 1}, Vector::Ones(1));
    for (Index j = 0; j < phi.order(); ++j) {
        const auto& u = phi.core(j);
        const Index q = u.right_rank() * u.right_rank();
        DenseTensor acc(Shape{q, q, q, q});
        for (char c : labels) {
            const Matrix tt = site_transfer(u, pauli_matrix(c)).transpose();
            DenseTensor w = v;
            for (Index mode = 0; mode < 4; ++mode) w = mode_product(w, tt, mode);
            acc.data() += w.data();
        }
        v = std::move(acc);
    }
    return -std::log2(v.data()[0].real()) + static_cast<double>(phi.order());
}

QuantumChannel::QuantumChannel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw DomainError("a channel needs at least one Kraus operator");
    const Index din = kraus_.front().cols(), dout = kraus_.front().rows();
    Matrix sum = Matrix::Zero(din, din);
    for (const auto& k : kraus_) {
        if (k.cols() != din || k.rows() != dout) throw ShapeError("Kraus operators must share one shape");
        sum += k.adjoint() * k;
    }
    if ((sum - Matrix::Identity(din, din)).norm() > 1e-10) {
        throw DomainError("Kraus operators are not trace preserving");
    }
}

Matrix QuantumChannel::apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(dim_out(), dim_out());
    for (const auto& k : kraus_) out += k * rho * k.adjoint();
    return out;
}

QuantumChannel identity_channel(Index dim) { return QuantumChannel({Matrix::Identity(dim, dim)}); }

QuantumChannel antisymmetric_channel() {
    const double s = 1.0 / std::sqrt(2.0);
    return QuantumChannel({-s * (ket_bra(3, 1, 0) + ket_bra(3, 2, 1)), s * (ket_bra(3, 0, 0) - ket_bra(3, 2, 2)),
                           s * (ket_bra(3, 0, 1) + ket_bra(3, 1, 2))});
}

QuantumChannel gadc(double gamma, double noise) {
    if (!(gamma >= 0.0 && gamma <= 1.0) || !(noise >= 0.0 && noise <= 1.0)) {
        throw DomainError("GADC parameters must lie in [0, 1]");
    }
    const double g = gamma, n = noise;
    return QuantumChannel({std::sqrt(1 - n) * (ket_bra(2, 0, 0) + std::sqrt(1 - g) * ket_bra(2, 1, 1)),
                           std::sqrt(g * (1 - n)) * ket_bra(2, 0, 1),
                           std::sqrt(n) * (std::sqrt(1 - g) * ket_bra(2, 0, 0) + ket_bra(2, 1, 1)),
                           std::sqrt(g * n) * ket_bra(2, 1, 0)});
}

double channel_purity(const QuantumChannel& ch, const TTTensor& psi) {
    for (Index n : psi.shape())
        if (n != ch.dim_in()) throw ShapeError("state local dimension does not match the channel input");
    std::vector<Matrix> b;
    for (const auto& ka : ch.kraus())
        for (const auto& kb : ch.kraus()) b.push_back(ka.adjoint() * kb);
    // v (x) conj(v) carried as a matrix: V <- sum_ab T^H V T
    Matrix v = Matrix::Ones(1, 1);
    for (Index j = 0; j < psi.order(); ++j) {
        const auto& u = psi.core(j);
        const Index q = u.right_rank() * u.right_rank();
        Matrix next = Matrix::Zero(q, q);
        for (const auto& m : b) {
            const Matrix t = site_transfer(u, m);
            next.noalias() += t.adjoint() * v * t;
        }
        v = std::move(next);
    }
    return v(0, 0).real();
}

double channel_purity_dense(const QuantumChannel& ch, const DenseTensor& psi) {
    const Index n = psi.order();
    const auto& kr = ch.kraus();
    const Index nk = static_cast<Index>(kr.size());
    Index combos = 1;
    for (Index j = 0; j < 2 * n; ++j) combos *= nk;
    double total = 0.0;
    for (Index c = 0; c < combos; ++c) {
        Index rest = c;
        DenseTensor w = psi;
        for (Index j = 0; j < n; ++j) {
            const Index a = rest % nk;
            rest /= nk;
            const Index bi = rest % nk;
            rest /= nk;
            w = mode_product(w, kr[static_cast<std::size_t>(a)].adjoint() * kr[static_cast<std::size_t>(bi)], j);
        }
        total += std::norm(inner(psi, w));
    }
    return total;
}

Objective renyi2_cost(std::shared_ptr<const QuantumChannel> ch, double log_base, double fd_step) {
    if (!(log_base > 1.0)) throw DomainError("logarithm base must exceed 1");
    Objective o;
    const double scale = 1.0 / std::log(log_base);
    o.cost = [ch, scale](const NTTPoint& x) { return -std::log(channel_purity(*ch, x.left())) * scale; };
    auto cost = o.cost;
    o.grad = [cost, fd_step](const PointPtr& x) { return fd_gradient(x, cost, fd_step); };
    return o;
}

EntropyResult min_output_entropy(std::shared_ptr<const QuantumChannel> ch, Index n, Index r, const RCGConfig& cfg,
                                 Index restarts, std::uint64_t seed, double log_base) {
    if (n < 1 || restarts < 1) throw DomainError("min_output_entropy needs n >= 1 and at least one restart");
    const Shape shape(static_cast<std::size_t>(n), ch->dim_in());
    const TTRank rank = clamp_ranks(shape, TTRank::uniform(n, r));
    const Objective obj = renyi2_cost(ch, log_base);
    EntropyResult out;
    out.s2 = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < restarts; ++i) {
        std::seed_seq seq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(i)};
        Rng rng(seq);
        const NTTPoint x0 = random_point(shape, rank, rng, Field::Complex);
        RunTrace t = rcg_minimize(obj, x0, cfg);
        out.per_restart.push_back(t.final_cost());
        out.s2 = std::min(out.s2, t.final_cost());
        spdlog::info("renyi: n={} r={} restart {} -> {:.10f} ({} iterations, {})", n, r, i, t.final_cost(),
                     t.iterations(), to_string(t.reason));
        out.traces.push_back(std::move(t));
    }
    return out;
}

TTTensor magic_state(Index n) {
    Vector h(2);
    h << std::cos(std::numbers::pi / 8.0), std::sin(std::numbers::pi / 8.0);
    std::vector<Vector> f(static_cast<std::size_t>(n), h);
    return TTTensor::rank_one(f);
}

std::vector<cplx> solve_coefficients(const std::vector<PointPtr>& comps, const TTTensor& target, bool* ridge) {
    const Index r = static_cast<Index>(comps.size());
    Matrix g(r, r);
    Vector b(r);
    for (Index j = 0; j < r; ++j) {
        b[j] = tt_inner(comps[static_cast<std::size_t>(j)]->left(), target);
        for (Index k = 0; k < r; ++k)
            g(j, k) = tt_inner(comps[static_cast<std::size_t>(j)]->left(), comps[static_cast<std::size_t>(k)]->left());
    }
    g = 0.5 * (g + g.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    bool used = false;
    if (!(lo > 1e-12 * std::max(1.0, hi))) {
        g += 1e-12 * Matrix::Identity(r, r);
        used = true;
    }
    if (ridge) *ridge = used;
    const Vector c = g.ldlt().solve(b);
    return {c.data(), c.data() + c.size()};
}

double stab_cost(const StabDecomposition& s, const TTTensor& target) {
    const Index r = static_cast<Index>(s.components.size());
    cplx quad = 0.0, lin = 0.0;
    for (Index j = 0; j < r; ++j) {
        const auto& pj = s.components[static_cast<std::size_t>(j)]->left();
        const cplx cj = s.coefficients[static_cast<std::size_t>(j)];
        lin += std::conj(cj) * tt_inner(pj, target);
        for (Index k = 0; k < r; ++k)
            quad += std::conj(cj) * s.coefficients[static_cast<std::size_t>(k)] *
                    tt_inner(pj, s.components[static_cast<std::size_t>(k)]->left());
    }
    const double fit = 0.5 * (tt_inner(target, target).real() + quad.real() - 2.0 * lin.real());
    double magic = 0.0;
    for (const auto& p : s.components) magic += sre2_mps(*p);
    return fit + s.lambda * magic;
}

double stab_infidelity(const StabDecomposition& s, const TTTensor& target) {
    cplx ov = 0.0;
    for (std::size_t j = 0; j < s.components.size(); ++j)
        ov += s.coefficients[j] * tt_inner(target, s.components[j]->left());
    return 1.0 - std::norm(ov);
}

namespace {

using Components = std::vector<PointPtr>;
using ProductTangent = std::vector<NTTTangent>;

double product_inner(const ProductTangent& a, const ProductTangent& b) {
    double out = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) out += tangent_inner(a[j], b[j]).real();
    return out;
}

struct StabProblem {
    const TTTensor& target;
    double lambda = 1.0;
    double fd_step = 0.0;

    double cost(const Components& comps) const {
        StabDecomposition s{solve_coefficients(comps, target), comps, lambda};
        return stab_cost(s, target);
    }

    ProductTangent grad(const Components& comps) const {
        ProductTangent g;
        for (std::size_t j = 0; j < comps.size(); ++j) {
            auto fj = [&, j](const NTTPoint& phi) {
                Components trial = comps;
                trial[j] = std::make_shared<const NTTPoint>(phi);
                return cost(trial);
            };
            g.push_back(fd_gradient(comps[j], fj, fd_step));
        }
        return g;
    }
};

// Same iteration as rcg_minimize, with every quantity taken componentwise.
Termination product_rcg(const StabProblem& prob, Components& x, const RCGConfig& cfg, std::vector<TraceRow>& rows,
                        Index iter_offset) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(clock::now() - start).count(); };
    const std::size_t R = x.size();

    double f = prob.cost(x);
    ProductTangent g = prob.grad(x);
    double gn = std::sqrt(product_inner(g, g));
    ProductTangent v;
    for (const auto& gj : g) v.push_back(-gj);
    double prev_step = 0.0;
    std::vector<double> costs{f};

    for (Index it = 1; it <= cfg.max_iters; ++it) {
        if (gn <= cfg.grad_tol * std::max(1.0, std::abs(f))) return Termination::GradientTolerance;
        if (cfg.time_limit > 0.0 && elapsed_ms() > 1e3 * cfg.time_limit) return Termination::TimeLimit;

        double vn = std::sqrt(product_inner(v, v));
        double slope = product_inner(g, v);
        bool steepest = false;
        auto reset = [&] {
            for (std::size_t j = 0; j < R; ++j) v[j] = -g[j];
            vn = gn;
            slope = -gn * gn;
            steepest = true;
        };
        if (!(slope < -1e-14 * gn * vn)) reset();

        Components next;
        double fn = 0.0;
        std::optional<double> step;
        for (int attempt = 0; attempt < 2 && !step; ++attempt) {
            double s = prev_step > 0.0 ? 2.0 * prev_step : 1.0 / vn;
            for (int b = 0; b <= cfg.line_search.max_backtracks; ++b) {
                Components trial;
                for (std::size_t j = 0; j < R; ++j) trial.push_back(make_point(retract(*x[j], v[j], s)));
                const double ft = prob.cost(trial);
                if (std::isfinite(ft) && ft <= f + cfg.line_search.c1 * s * slope) {
                    step = s;
                    next = std::move(trial);
                    fn = ft;
                    break;
                }
                s *= cfg.line_search.backtrack;
            }
            if (step || steepest) break;
            reset();
        }
        if (!step) return Termination::LineSearchFailure;
        prev_step = *step;

        ProductTangent gnext = prob.grad(next);
        const double gnn = std::sqrt(product_inner(gnext, gnext));
        ProductTangent gt, vt;
        for (std::size_t j = 0; j < R; ++j) {
            gt.push_back(vector_transport(next[j], g[j]));
            vt.push_back(vector_transport(next[j], v[j]));
        }
        double beta = 0.0;
        if (cfg.beta == BetaRule::PolakRibierePlus && gn > 0.0) {
            ProductTangent diff;
            for (std::size_t j = 0; j < R; ++j) diff.push_back(gnext[j] - gt[j]);
            beta = std::max(0.0, product_inner(gnext, diff) / (gn * gn));
        } else if (cfg.beta == BetaRule::FletcherReeves && gn > 0.0) {
            beta = (gnn * gnn) / (gn * gn);
        }
        for (std::size_t j = 0; j < R; ++j) v[j] = beta * vt[j] - gnext[j];

        rows.push_back({iter_offset + it, fn, gnn, *step, beta, elapsed_ms()});
        spdlog::debug("stabrank: lambda {:.1e} it={} f={:.6e} |g|={:.3e}", prob.lambda, it, fn, gnn);
        x = std::move(next);
        f = fn;
        g = std::move(gnext);
        gn = gnn;
        costs.push_back(f);
        const auto n = static_cast<Index>(costs.size());
        if (n > cfg.cost_window &&
            std::abs(costs[static_cast<std::size_t>(n - 1 - cfg.cost_window)] - f) <= cfg.cost_tol * std::abs(f)) {
            return Termination::CostStagnation;
        }
    }
    return Termination::MaxIterations;
}

} // namespace

StabRankResult stab_rank_solve(const TTTensor& target, Index R, double lambda, Index r, const StabRankConfig& cfg,
                               std::uint64_t seed) {
    if (R < 1) throw DomainError("stabilizer rank needs at least one component");
    if (!(lambda >= 0.0)) throw DomainError("penalty must be non-negative");
    require_unit(tt_norm(target), "stab_rank_solve");
    const Shape shape = target.shape();
    const TTRank rank = clamp_ranks(shape, TTRank::uniform(target.order(), r));

    // real targets start from real components, as the other real problems do
    bool real = true;
    for (const auto& c : target.cores()) real = real && c.left_unfolding().imag().norm() == 0.0;
    Rng rng(seed);
    Components comps;
    for (Index j = 0; j < R; ++j)
        comps.push_back(make_point(random_point(shape, rank, rng, real ? Field::Real : Field::Complex)));

    StabRankResult out;
    std::vector<double> stages;
    for (double f : cfg.lambda_ramp) stages.push_back(f * lambda);
    stages.push_back(lambda);
    for (double lam : stages) {
        const StabProblem prob{target, lam, cfg.fd_step};
        const Index offset = out.trace.empty() ? 0 : out.trace.back().iter;
        const Termination why = product_rcg(prob, comps, cfg.rcg, out.trace, offset);
        spdlog::debug("stabrank: stage lambda {:.1e} ended with f = {:.6e} ({})", lam, prob.cost(comps), to_string(why));
    }

    out.decomposition.components = comps;
    out.decomposition.lambda = lambda;
    out.decomposition.coefficients = solve_coefficients(comps, target, &out.ridge_used);
    out.cost = stab_cost(out.decomposition, target);
    out.infidelity = stab_infidelity(out.decomposition, target);
    for (const auto& p : comps) out.sre.push_back(sre2_mps(*p));
    return out;
}

} // namespace nttkit
