#include "nttkit/rcg.hpp"

#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

namespace nttkit {

std::string to_string(Termination t) {
    switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::CostStagnation: return "cost_stagnation";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailure: return "line_search_failure";
    case Termination::TimeLimit: return "time_limit";
    }
    return "unknown";
}

std::optional<double> line_search(const Objective& obj, const PointPtr& x, double fx, const NTTTangent& v,
                                  double slope, double initial, const LineSearchConfig& cfg, NTTPoint* accepted,
                                  double* accepted_cost) {
    if (!(cfg.c1 > 0.0 && cfg.c1 < 1.0)) throw DomainError("Armijo constant must lie in (0, 1)");
    double s = initial;
    for (int b = 0; b <= cfg.max_backtracks; ++b) {
        double fn = std::numeric_limits<double>::infinity();
        std::optional<NTTPoint> xn;
        try {
            xn = retract(*x, v, s);
            fn = obj.cost(*xn);
        } catch (const NumericalError&) {
            // a collapsed truncation counts as a rejected trial
        }
        if (std::isfinite(fn) && fn <= fx + cfg.c1 * s * slope) {
            if (accepted) *accepted = std::move(*xn);
            if (accepted_cost) *accepted_cost = fn;
            return s;
        }
        s *= cfg.backtrack;
    }
    return std::nullopt;
}

RunTrace rcg_minimize(const Objective& obj, const NTTPoint& x0, const RCGConfig& cfg, const IterateCallback& on_iterate) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(clock::now() - start).count(); };

    RunTrace trace;
    PointPtr x = make_point(x0);
    double f = obj.cost(*x);
    NTTTangent g = obj.grad(x);
    double gn = tangent_norm(g);
    trace.rows.push_back({0, f, gn, 0.0, 0.0, elapsed_ms()});
    if (on_iterate) on_iterate(trace.rows.back(), *x);

    NTTTangent v = -g;
    double prev_step = 0.0;
    trace.reason = Termination::MaxIterations;

    for (Index it = 1; it <= cfg.max_iters; ++it) {
        if (gn <= cfg.grad_tol * std::max(1.0, std::abs(f))) {
            trace.reason = Termination::GradientTolerance;
            break;
        }
        if (cfg.time_limit > 0.0 && elapsed_ms() > 1e3 * cfg.time_limit) {
            trace.reason = Termination::TimeLimit;
            break;
        }

        double vn = tangent_norm(v);
        double slope = tangent_inner(g, v).real();
        bool steepest = false;
        if (!(slope < -1e-14 * gn * vn)) {
            v = -g;
            vn = gn;
            slope = -gn * gn;
            steepest = true;
        }

        NTTPoint next;
        double fn = 0.0;
        std::optional<double> step;
        for (int attempt = 0; attempt < 2 && !step; ++attempt) {
            double initial = 0.0;
            if (cfg.line_search.model_initial_step && obj.model_step) {
                if (auto s = obj.model_step(x, v); s && std::isfinite(*s) && *s > 0.0) initial = *s;
            }
            if (initial <= 0.0) initial = prev_step > 0.0 ? 2.0 * prev_step : 1.0 / vn;
            step = line_search(obj, x, f, v, slope, initial, cfg.line_search, &next, &fn);
            if (!step && !steepest) {
                spdlog::debug("rcg: line search failed at iteration {}, restarting with steepest descent", it);
                v = -g;
                vn = gn;
                slope = -gn * gn;
                steepest = true;
            } else {
                break;
            }
        }
        if (!step) {
            trace.reason = Termination::LineSearchFailure;
            break;
        }
        prev_step = *step;

        PointPtr xn = make_point(std::move(next));
        NTTTangent gnext = obj.grad(xn);
        const double gnn = tangent_norm(gnext);

        double beta = 0.0;
        if (cfg.beta != BetaRule::None && gn > 0.0) {
            if (cfg.beta == BetaRule::PolakRibierePlus) {
                const NTTTangent gt = vector_transport(xn, g);
                beta = std::max(0.0, tangent_inner(gnext, gnext - gt).real() / (gn * gn));
            } else {
                beta = (gnn * gnn) / (gn * gn);
            }
        }
        if (beta > 0.0) {
            v = beta * vector_transport(xn, v);
            v -= gnext;
        } else {
            v = -gnext;
        }

        trace.rows.push_back({it, fn, gnn, *step, beta, elapsed_ms()});
        if (on_iterate) on_iterate(trace.rows.back(), *xn);
        spdlog::debug("rcg: it={} f={:.6e} |g|={:.3e} s={:.3e} beta={:.3f}", it, fn, gnn, *step, beta);

        x = std::move(xn);
        f = fn;
        g = std::move(gnext);
        gn = gnn;

        const auto n = static_cast<Index>(trace.rows.size());
        if (n > cfg.cost_window) {
            const double old = trace.rows[static_cast<std::size_t>(n - 1 - cfg.cost_window)].cost;
            if (std::abs(old - f) <= cfg.cost_tol * std::abs(f)) {
                trace.reason = Termination::CostStagnation;
                break;
            }
        }
    }
    trace.final_point = x;
    return trace;
}

std::vector<TTRank> rank_schedule(const Shape& shape, Index start, Index target) {
    const Index d = static_cast<Index>(shape.size());
    if (start < 1 || target < start) throw RankError("rank schedule needs 1 <= start <= target");
    std::vector<TTRank> out;
    for (Index r = start; r <= target; ++r) {
        TTRank next = clamp_ranks(shape, TTRank::uniform(d, r));
        if (out.empty() || !(out.back() == next)) out.push_back(std::move(next));
    }
    return out;
}

RunTrace rank_continuation(const Objective& obj, const NTTPoint& x0, const std::vector<TTRank>& schedule,
                           Index stage_iters, const RCGConfig& cfg, const IterateCallback& on_iterate) {
    if (schedule.empty()) throw RankError("rank schedule is empty");
    RunTrace total;
    NTTPoint x = x0;
    Index iter_offset = 0;
    double time_offset = 0.0;
    for (std::size_t s = 0; s < schedule.size(); ++s) {
        require_feasible(x.shape(), schedule[s]);
        if (!(x.ranks() == schedule[s])) x = pad_ranks(x, schedule[s]);
        RCGConfig stage = cfg;
        const bool last = s + 1 == schedule.size();
        if (!last) stage.max_iters = stage_iters;
        RunTrace t = rcg_minimize(obj, x, stage, on_iterate);
        spdlog::info("continuation: rank {} finished after {} iterations, f = {:.12e} ({})", schedule[s].to_string(),
                     t.iterations(), t.final_cost(), to_string(t.reason));
        // the first row of a later stage repeats the previous final point
        const std::size_t skip = s == 0 ? 0 : 1;
        for (std::size_t i = skip; i < t.rows.size(); ++i) {
            TraceRow row = t.rows[i];
            row.iter += iter_offset;
            row.time_ms += time_offset;
            total.rows.push_back(row);
        }
        total.stage_ends.push_back(total.rows.size() - 1);
        iter_offset = total.rows.back().iter;
        time_offset = total.rows.back().time_ms;
        x = *t.final_point;
        total.final_point = t.final_point;
        total.reason = t.reason;
    }
    return total;
}

} // namespace nttkit
