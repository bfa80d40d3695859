#pragma once

#include "nttkit/rcg.hpp"

namespace nttkit {

enum class FactorHint { Identity, Diagonal, Dense };

/// H = sum_l H_{l,d} (x) ... (x) H_{l,1}; factor k of every term acts on mode k.
class KroneckerSumOperator {
public:
    KroneckerSumOperator(std::vector<std::vector<Matrix>> terms, bool hermitian);

    Index order() const { return static_cast<Index>(shape_.size()); }
    const Shape& shape() const { return shape_; }
    Index term_count() const { return static_cast<Index>(terms_.size()); }
    const Matrix& factor(Index l, Index k) const { return terms_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)]; }
    FactorHint hint(Index l, Index k) const { return hints_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)]; }
    const std::vector<Matrix>& term(Index l) const { return terms_[static_cast<std::size_t>(l)]; }
    bool hermitian() const { return hermitian_; }

    /// Non-identity factors occupy at most two adjacent modes in every term.
    bool local() const;

    /// Dense N x N assembly, mode 1 fastest.
    Matrix dense(Index guard = Index{1} << 12) const;

private:
    std::vector<std::vector<Matrix>> terms_;
    std::vector<std::vector<FactorHint>> hints_;
    Shape shape_;
    bool hermitian_ = false;
};

/// Tridiagonal (-1, 2, -1) in every mode.
KroneckerSumOperator laplace_operator(Index d, Index n);

/// -sum_k Z_k Z_{k+1} - t sum_k X_k on d qubits.
KroneckerSumOperator ising_operator(Index d, double t);

/// H vec(X) as a TT. Local operators go through a matrix-product operator with
/// bond 2 + (number of two-site terms across the bond); others through the naive sum.
TTTensor apply_operator(const KroneckerSumOperator& h, const TTTensor& x);

/// Sum over terms of kron_apply, accumulated with tt_add (interior rank L r).
TTTensor apply_operator_naive(const KroneckerSumOperator& h, const TTTensor& x);

double rayleigh(const KroneckerSumOperator& h, const NTTPoint& x);

enum class Extremum { Min, Max };

/// +-<X, HX>, gradient +-P(2 HX), and the minimizer of the Rayleigh quotient
/// along X + sV as initial step.
Objective rayleigh_objective(std::shared_ptr<const KroneckerSumOperator> h, Extremum e);

struct EigenResult {
    double lambda = 0.0;
    PointPtr point;
    RunTrace trace;
    /// Eigenvalue estimate at the end of each continuation stage.
    std::vector<double> stage_lambdas;
};

/// NTT-RCG on the Rayleigh quotient. A schedule with one entry is a plain run.
EigenResult eigen_solve(std::shared_ptr<const KroneckerSumOperator> h, const std::vector<TTRank>& schedule,
                        Extremum e, const RCGConfig& cfg, std::uint64_t seed, Index stage_iters = 50);

/// Closed-form Laplace eigenpair for the 1-based multi-index idx.
std::pair<double, TTTensor> laplace_reference(Index d, Index n, std::span<const Index> idx);

/// sqrt(2 - 2 |<X, v>|^2), equal to ||xx^H - vv^H||_F for unit vectors.
double subspace_distance(const NTTPoint& x, const TTTensor& v);

struct ALSResult {
    double lambda = 0.0;
    PointPtr point;
    /// Rayleigh value after every local solve.
    std::vector<double> trace;
};

/// Single-site alternating scheme with dense local eigensolves.
ALSResult als_baseline(const KroneckerSumOperator& h, const TTRank& r, Index sweeps, std::uint64_t seed,
                       Extremum e = Extremum::Min);

} // namespace nttkit
