#include "nttkit/completion.hpp"

#include <cmath>
#include <unordered_map>

#include <spdlog/spdlog.h>

namespace nttkit {

namespace {

std::vector<MultiIndex> to_multi(const Shape& shape, const std::vector<Index>& lin) {
    std::vector<MultiIndex> out;
    out.reserve(lin.size());
    for (Index l : lin) {
        MultiIndex idx(shape.size());
        for (std::size_t k = 0; k < shape.size(); ++k) {
            idx[k] = l % shape[k];
            l /= shape[k];
        }
        out.push_back(std::move(idx));
    }
    return out;
}

double relative_error(const Vector& got, const Vector& want) {
    const double den = want.norm();
    return den > 0.0 ? (got - want).norm() / den : (got - want).norm();
}

} // namespace

std::vector<Index> sample_linear(Index total, Index m, Rng& rng) {
    if (m < 0 || m > total) {
        throw DomainError("cannot draw " + std::to_string(m) + " distinct indices from " + std::to_string(total));
    }
    // sparse Fisher-Yates: only displaced slots are stored
    std::unordered_map<Index, Index> moved;
    auto at = [&](Index i) {
        auto it = moved.find(i);
        return it == moved.end() ? i : it->second;
    };
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        std::uniform_int_distribution<Index> pick(i, total - 1);
        const Index j = pick(rng);
        const Index vi = at(i), vj = at(j);
        moved[j] = vi;
        moved[i] = vj;
        out.push_back(vj);
    }
    return out;
}

std::vector<MultiIndex> sample_omega(const Shape& shape, Index m, std::uint64_t seed) {
    Rng rng(seed);
    return to_multi(shape, sample_linear(checked_shape_size(shape, std::numeric_limits<Index>::max()), m, rng));
}

std::pair<std::vector<MultiIndex>, std::vector<MultiIndex>> sample_split(const Shape& shape, Index m, Rng& rng) {
    const Index total = checked_shape_size(shape, std::numeric_limits<Index>::max());
    if (m > total) throw DomainError("sample size exceeds the number of entries");
    const Index g = std::min(m, total - m);
    std::vector<Index> lin = sample_linear(total, m + g, rng);
    std::vector<Index> om(lin.begin(), lin.begin() + m), ga(lin.begin() + m, lin.end());
    return {to_multi(shape, om), to_multi(shape, ga)};
}

Vector tt_gather(const TTTensor& x, const std::vector<MultiIndex>& idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t e = 0; e < idx.size(); ++e) out[static_cast<Index>(e)] = tt_entry(x, idx[e]);
    return out;
}

Objective completion_objective(std::shared_ptr<const ObservationSet> obs) {
    Objective o;
    o.quadratic = true;
    o.cost = [obs](const NTTPoint& x) {
        return 0.5 * (tt_gather(x.left(), obs->omega) - obs->values).squaredNorm();
    };
    o.grad = [obs](const PointPtr& x) {
        SparseTensor r{obs->shape, obs->omega, tt_gather(x->left(), obs->omega) - obs->values};
        return project_tangent(x, r);
    };
    o.model_step = [obs](const PointPtr& x, const NTTTangent& v) -> std::optional<double> {
        const Vector pv = tt_gather(tangent_to_tt(v), obs->omega);
        const double den = pv.squaredNorm();
        if (den <= 0.0) return std::nullopt;
        const Vector res = tt_gather(x->left(), obs->omega) - obs->values;
        return -pv.dot(res).real() / den;
    };
    return o;
}

double train_error(const NTTPoint& x, const ObservationSet& obs) {
    return relative_error(tt_gather(x.left(), obs.omega), obs.values);
}

double test_error(const NTTPoint& x, const ObservationSet& obs) {
    // with everything observed there is nothing held out; score on all entries
    if (obs.gamma.empty()) return train_error(x, obs);
    return relative_error(tt_gather(x.left(), obs.gamma), obs.gamma_values);
}

RecoveryReport recovery_run(const RecoveryParams& p, const RCGConfig& cfg) {
    if (p.noise < 0.0) throw DomainError("noise level must be non-negative");
    Rng master(p.seed);
    const std::uint64_t truth_seed = master(), sample_seed = master(), noise_seed = master(), init_seed = master();

    const NTTPoint truth = random_point(p.shape, p.rank, truth_seed, Field::Real);
    const Index total = checked_shape_size(p.shape, std::numeric_limits<Index>::max());
    const Index m = std::min(p.samples, total);

    auto obs = std::make_shared<ObservationSet>();
    obs->shape = p.shape;
    Rng srng(sample_seed);
    std::tie(obs->omega, obs->gamma) = sample_split(p.shape, m, srng);

    obs->values = tt_gather(truth.left(), obs->omega);
    obs->gamma_values = tt_gather(truth.left(), obs->gamma);
    if (p.noise > 0.0) {
        Rng nrng(noise_seed);
        if (total <= kDefaultDenseGuard) {
            // A = truth + noise * E / ||E|| on the full tensor
            DenseTensor a = truth.full();
            Vector e = gaussian_vector(a.size(), nrng, Field::Real);
            a.data() += (p.noise / e.norm()) * e;
            auto pick = [&](const std::vector<MultiIndex>& idx) {
                Vector v(static_cast<Index>(idx.size()));
                for (std::size_t i = 0; i < idx.size(); ++i) v[static_cast<Index>(i)] = a(idx[i]);
                return v;
            };
            obs->values = pick(obs->omega);
            obs->gamma_values = pick(obs->gamma);
        } else {
            // too large to materialize: same per-entry scale noise/sqrt(N), drawn only where it is read
            const double scale = p.noise / std::sqrt(static_cast<double>(total));
            obs->values += scale * gaussian_vector(obs->values.size(), nrng, Field::Real);
            obs->gamma_values += scale * gaussian_vector(obs->gamma_values.size(), nrng, Field::Real);
        }
    }

    const NTTPoint x0 = random_point(p.shape, p.rank, init_seed, Field::Real);
    RecoveryReport rep;
    auto cb = [&](const TraceRow& row, const NTTPoint& x) {
        const double te = test_error(x, *obs);
        rep.test_errors.push_back(te);
        if (rep.hit_iteration < 0 && te < p.success_threshold) rep.hit_iteration = row.iter;
    };
    rep.trace = rcg_minimize(completion_objective(obs), x0, cfg, cb);
    rep.iterations = rep.trace.iterations();
    rep.reason = rep.trace.reason;
    rep.train_error = train_error(*rep.trace.final_point, *obs);
    rep.test_error = test_error(*rep.trace.final_point, *obs);
    spdlog::info("completion: shape {} m={} noise={:.1e} seed={} -> test {:.3e} after {} iterations",
                 shape_to_string(p.shape), m, p.noise, p.seed, rep.test_error, rep.iterations);
    return rep;
}

std::vector<PhaseCell> phase_experiment(Index d, const std::vector<Index>& ns, const std::vector<Index>& ms,
                                        Index rank, Index trials, std::uint64_t seed, const RCGConfig& cfg) {
    std::vector<PhaseCell> out;
    for (Index n : ns) {
        const Shape shape(static_cast<std::size_t>(d), n);
        const Index total = shape_size(shape);
        const TTRank r = clamp_ranks(shape, TTRank::uniform(d, rank));
        for (Index m : ms) {
            PhaseCell cell{n, std::min(m, total), 0.0, {}};
            Index hits = 0;
            for (Index t = 0; t < trials; ++t) {
                std::seed_seq seq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(t)};
                Rng rng(seq);
                RecoveryParams p{shape, r, cell.m, 0.0, rng(), 1e-4};
                const RecoveryReport rep = recovery_run(p, cfg);
                cell.test_errors.push_back(rep.test_error);
                if (rep.hit_iteration >= 0) ++hits;
            }
            cell.success_fraction = trials > 0 ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
            out.push_back(std::move(cell));
        }
    }
    return out;
}

} // namespace nttkit
