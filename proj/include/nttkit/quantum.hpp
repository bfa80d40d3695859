#pragma once

#include "nttkit/rcg.hpp"

namespace nttkit {

/// 'I', 'X', 'Y' or 'Z'.
Matrix pauli_matrix(char label);

/// -log2(sum_P <P>^4) + n over all 4^n Pauli strings. Qubit k is mode k.
double sre2_dense(const DenseTensor& psi);

/// Same quantity through per-site transfer matrices, never forming the state.
double sre2_mps(const TTTensor& phi);
inline double sre2_mps(const NTTPoint& phi) { return sre2_mps(phi.left()); }

class QuantumChannel {
public:
    /// Throws DomainError unless sum_k K_k^H K_k = I within 1e-10.
    explicit QuantumChannel(std::vector<Matrix> kraus);

    const std::vector<Matrix>& kraus() const { return kraus_; }
    Index dim_in() const { return kraus_.front().cols(); }
    Index dim_out() const { return kraus_.front().rows(); }

    /// N(rho) for a single use.
    Matrix apply(const Matrix& rho) const;

private:
    std::vector<Matrix> kraus_;
};

QuantumChannel identity_channel(Index dim);
QuantumChannel antisymmetric_channel();
/// Generalized amplitude damping, gamma and N in [0, 1].
QuantumChannel gadc(double gamma, double noise);

/// tr(N^{(x)n}(psi psi^H)^2) by contracting per-site Kraus transfer matrices.
double channel_purity(const QuantumChannel& ch, const TTTensor& psi);

/// Same through the dense Kraus double sum, for small n.
double channel_purity_dense(const QuantumChannel& ch, const DenseTensor& psi);

/// f(psi) = -log_base tr(N^{(x)n}(rho)^2); default base 2.
Objective renyi2_cost(std::shared_ptr<const QuantumChannel> ch, double log_base = 2.0, double fd_step = 0.0);

struct EntropyResult {
    double s2 = 0.0;
    std::vector<double> per_restart;
    std::vector<RunTrace> traces;
};

/// Best of `restarts` seeded NTT-RCG runs with ranks min(clamp, r).
EntropyResult min_output_entropy(std::shared_ptr<const QuantumChannel> ch, Index n, Index r, const RCGConfig& cfg,
                                 Index restarts, std::uint64_t seed, double log_base = 2.0);

/// |H> = cos(pi/8)|0> + sin(pi/8)|1> on n qubits as a rank-1 TT.
TTTensor magic_state(Index n);

struct StabDecomposition {
    std::vector<cplx> coefficients;
    std::vector<PointPtr> components;
    double lambda = 1.0;
};

struct StabRankConfig {
    /// Forward-difference step (0 picks the default rule).
    double fd_step = 0.0;
    /// Penalty continuation: stages at these multiples of lambda run before lambda itself.
    std::vector<double> lambda_ramp{1e-3, 1e-2, 1e-1};
    /// Joint RCG settings, applied to every stage.
    RCGConfig rcg = [] {
        RCGConfig c;
        c.max_iters = 500;
        return c;
    }();
};

struct StabRankResult {
    double infidelity = 1.0;
    std::vector<double> sre;
    double cost = 0.0;
    StabDecomposition decomposition;
    bool ridge_used = false;
    /// One row per joint iteration across all stages.
    std::vector<TraceRow> trace;
};

/// Least-squares coefficients for fixed components: G c = b with G_jk = <phi_j, phi_k>,
/// b_j = <phi_j, psi>. Adds a 1e-12 ridge when G is singular.
std::vector<cplx> solve_coefficients(const std::vector<PointPtr>& comps, const TTTensor& target, bool* ridge = nullptr);

/// 1/2 || sum c_j phi_j - psi ||^2 + lambda sum_j M2(phi_j), using Gram inner products only.
double stab_cost(const StabDecomposition& s, const TTTensor& target);

/// 1 - |sum_j c_j <psi, phi_j>|^2.
double stab_infidelity(const StabDecomposition& s, const TTTensor& target);

/// RCG on the product of component manifolds. Coefficients are re-solved exactly
/// at every cost evaluation, so only the components carry tangent directions.
StabRankResult stab_rank_solve(const TTTensor& target, Index R, double lambda, Index r, const StabRankConfig& cfg,
                               std::uint64_t seed);

} // namespace nttkit
