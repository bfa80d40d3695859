#pragma once

#include "nttkit/rcg.hpp"

namespace nttkit {

struct ObservationSet {
    Shape shape;
    std::vector<MultiIndex> omega;
    Vector values;
    /// Held-out entries, disjoint from omega. May be empty.
    std::vector<MultiIndex> gamma;
    Vector gamma_values;
};

/// First m positions of a seeded Fisher-Yates shuffle of [0, N), N = prod(shape).
std::vector<Index> sample_linear(Index total, Index m, Rng& rng);

/// m distinct uniformly sampled multi-indices.
std::vector<MultiIndex> sample_omega(const Shape& shape, Index m, std::uint64_t seed);

/// Omega of size m plus a disjoint Gamma of size min(m, N - m), from one shuffle.
std::pair<std::vector<MultiIndex>, std::vector<MultiIndex>> sample_split(const Shape& shape, Index m, Rng& rng);

/// Entries of X at the given indices.
Vector tt_gather(const TTTensor& x, const std::vector<MultiIndex>& idx);

/// f(X) = 1/2 ||P_Omega(X) - P_Omega(A)||^2 with the sparse tangent projection as gradient.
Objective completion_objective(std::shared_ptr<const ObservationSet> obs);

/// ||P(X) - P(A)|| / ||P(A)|| over Omega (train) or Gamma (test).
double train_error(const NTTPoint& x, const ObservationSet& obs);
double test_error(const NTTPoint& x, const ObservationSet& obs);

struct RecoveryReport {
    double train_error = 0.0;
    double test_error = 0.0;
    Index iterations = 0;
    /// First iteration whose test error fell below the success threshold (-1 if never).
    Index hit_iteration = -1;
    Termination reason = Termination::MaxIterations;
    RunTrace trace;
    std::vector<double> test_errors;  // per iteration
};

struct RecoveryParams {
    Shape shape;
    TTRank rank;
    Index samples = 0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    double success_threshold = 1e-4;
};

/// Ground truth from random_point, optional noise on the full tensor, NTT-RCG
/// from an independent random start.
RecoveryReport recovery_run(const RecoveryParams& p, const RCGConfig& cfg);

struct PhaseCell {
    Index n = 0;
    Index m = 0;
    double success_fraction = 0.0;
    std::vector<double> test_errors;
};

/// Per cell, the fraction of trials with test error below 1e-4 within
/// `cfg.max_iters` iterations. m is clamped to n^d.
std::vector<PhaseCell> phase_experiment(Index d, const std::vector<Index>& ns, const std::vector<Index>& ms,
                                        Index rank, Index trials, std::uint64_t seed, const RCGConfig& cfg);

} // namespace nttkit
