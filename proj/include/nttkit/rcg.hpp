#pragma once

#include <optional>

#include "nttkit/manifold.hpp"

namespace nttkit {

struct Objective {
    std::function<double(const NTTPoint&)> cost;
    std::function<NTTTangent(const PointPtr&)> grad;
    /// Minimizer of a one-dimensional model of s -> f(X + sV), if the objective has one.
    std::function<std::optional<double>(const PointPtr&, const NTTTangent&)> model_step;
    bool quadratic = false;
};

enum class BetaRule { PolakRibierePlus, FletcherReeves, None };

struct LineSearchConfig {
    double c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 25;
    /// Use the objective's model step when available.
    bool model_initial_step = true;
};

struct RCGConfig {
    Index max_iters = 2000;
    /// Stop when ||grad|| <= grad_tol * max(1, |f|).
    double grad_tol = 1e-10;
    /// Stop when |f(t - window) - f(t)| <= cost_tol * |f(t)|.
    double cost_tol = 1e-14;
    Index cost_window = 5;
    BetaRule beta = BetaRule::PolakRibierePlus;
    LineSearchConfig line_search;
    /// Optional wall-clock budget in seconds (0 = none).
    double time_limit = 0.0;
};

struct TraceRow {
    Index iter = 0;
    double cost = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
    double beta = 0.0;
    double time_ms = 0.0;
};

enum class Termination { GradientTolerance, CostStagnation, MaxIterations, LineSearchFailure, TimeLimit };

std::string to_string(Termination t);

struct RunTrace {
    std::vector<TraceRow> rows;
    PointPtr final_point;
    Termination reason = Termination::MaxIterations;
    /// Row index where each continuation stage ended (last row of the stage).
    std::vector<std::size_t> stage_ends;

    double final_cost() const { return rows.empty() ? 0.0 : rows.back().cost; }
    Index iterations() const { return rows.empty() ? 0 : rows.back().iter; }
};

/// Called after every accepted iterate (including the initial point).
using IterateCallback = std::function<void(const TraceRow&, const NTTPoint&)>;

/// Armijo backtracking along retract(X, V, s). Returns the accepted step, or
/// nothing after max_backtracks. `accepted` receives the new point and cost.
std::optional<double> line_search(const Objective& obj, const PointPtr& x, double fx, const NTTTangent& v,
                                  double slope, double initial, const LineSearchConfig& cfg,
                                  NTTPoint* accepted = nullptr, double* accepted_cost = nullptr);

RunTrace rcg_minimize(const Objective& obj, const NTTPoint& x0, const RCGConfig& cfg,
                      const IterateCallback& on_iterate = {});

/// r_{t+1} = min(clamp, r_t + 1) starting at `start`, ending at `target`.
std::vector<TTRank> rank_schedule(const Shape& shape, Index start, Index target);

/// Runs `stage_iters` iterations per stage, warm-starting each stage by padding
/// the previous point. The last stage runs to the limits in `cfg`.
RunTrace rank_continuation(const Objective& obj, const NTTPoint& x0, const std::vector<TTRank>& schedule,
                           Index stage_iters, const RCGConfig& cfg, const IterateCallback& on_iterate = {});

} // namespace nttkit
