#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ontd/linalg.hpp"
#include "ontd/tensor.hpp"

namespace ontd {

/// Parameters for the per-mode ADMM solve of the relaxed projector model
///   min 1/2 ||A - K A||_F^2 + theta ||K||_1
///   s.t. tr(K) = J, K = K^T, 0 <= eig(K) <= 1, K >= 0.
struct AdmmParams {
    double theta = 1e-6;
    double rho1 = 0.1;
    double rho2 = 0.1;
    double rho3 = 0.1;
    double gamma = 1.0;  // dual step scale, must lie in (0, (1+sqrt(5))/2)
    double eps = 1e-5;
    std::size_t max_iter = 1000;
    bool literal_m_projection = false;

    /// Throws std::invalid_argument on an out-of-range field.
    void validate() const;
};

/// Iterate bundle for one mode: the projector iterate K and its three
/// splitting copies (X carries the l1 term, Z the entrywise nonnegativity,
/// M the spectral box), plus the multipliers and per-iteration histories.
struct AdmmState {
    DenseMatrix K, X, Z, M;
    DenseMatrix L1, L2, L3;
    std::size_t iter = 0;
    /// (||K - X||_F, ||K - Z||_F, ||K - M||_F) per iteration.
    std::vector<std::array<double, 3>> residual_history;
    /// 1/2 ||A - K A||_F^2 + theta ||X||_1 per iteration.
    std::vector<double> objective_history;
};

struct ModeDiagnostics {
    std::size_t iterations = 0;
    bool converged = false;
    double asymmetry = 0.0;  // ||K - K^T||_F at termination
    std::vector<std::array<double, 3>> residual_history;
    std::vector<double> objective_history;
};

double admm_objective(const DenseMatrix& k, const DenseMatrix& x,
                      const DenseMatrix& unfolding, double theta);

/// One mode solve. Owns the unfolding, the cached Gram matrix
/// A A^T and its shifted Cholesky factorization (computed once, reused
/// every iteration).
class ModeSolver {
public:
    ModeSolver(DenseMatrix unfolding, std::size_t target_rank, AdmmParams params);

    /// K = X = Z = M = (J/I) I (feasible trace, nonnegative, inside the
    /// box); multipliers zero.
    AdmmState init_state() const;

    void update_k(AdmmState& state) const;
    void update_blocks(AdmmState& state) const;
    void update_multipliers(AdmmState& state) const;

    struct Result {
        DenseMatrix projector;
        ModeDiagnostics diagnostics;
    };

    /// Iterate until both the max primal residual and the K-step change
    /// fall below eps * max(1, ||K||_F), or max_iter is hit.
    /// Non-convergence is reported in the diagnostics, not thrown.
    Result run() const;

    const DenseMatrix& unfolding() const { return unfolding_; }
    const DenseMatrix& gram() const { return gram_; }
    std::size_t target_rank() const { return target_rank_; }
    const AdmmParams& params() const { return params_; }

private:
    DenseMatrix unfolding_;
    std::size_t target_rank_;
    AdmmParams params_;
    DenseMatrix gram_;
    CholeskyFactor shifted_gram_;
};

}  // namespace ontd
