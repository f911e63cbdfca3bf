#include "ontd/admm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ontd/prox.hpp"

namespace ontd {

namespace {

constexpr double kGammaUpper = 1.6180339887498948482;  // (1 + sqrt(5)) / 2

DenseMatrix shifted(const DenseMatrix& gram, double shift) {
    DenseMatrix g = gram;
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += shift;
    return g;
}

}  // namespace

void AdmmParams::validate() const {
    if (theta < 0.0) throw std::invalid_argument("AdmmParams: theta must be nonnegative");
    if (rho1 <= 0.0 || rho2 <= 0.0 || rho3 <= 0.0)
        throw std::invalid_argument("AdmmParams: every rho must be positive");
    if (!(gamma > 0.0 && gamma < kGammaUpper))
        throw std::invalid_argument("AdmmParams: gamma must lie in (0, (1+sqrt(5))/2)");
    if (eps <= 0.0) throw std::invalid_argument("AdmmParams: eps must be positive");
    if (max_iter == 0) throw std::invalid_argument("AdmmParams: max_iter must be positive");
}

double admm_objective(const DenseMatrix& k, const DenseMatrix& x,
                      const DenseMatrix& unfolding, double theta) {
    const DenseMatrix residual = unfolding - k * unfolding;
    double l1 = 0.0;
    for (double v : x.values()) l1 += std::abs(v);
    const double f = frob_norm(residual);
    return 0.5 * f * f + theta * l1;
}

ModeSolver::ModeSolver(DenseMatrix unfolding, std::size_t target_rank, AdmmParams params)
    : unfolding_(std::move(unfolding)),
      target_rank_(target_rank),
      params_(params),
      gram_(unfolding_ * transpose(unfolding_)),
      shifted_gram_(shifted(gram_, params.rho1 + params.rho2 + params.rho3)) {
    params_.validate();
    if (target_rank_ == 0 || target_rank_ > unfolding_.rows())
        throw std::invalid_argument("ModeSolver: target rank out of range");
}

AdmmState ModeSolver::init_state() const {
    const std::size_t n = unfolding_.rows();
    const double fill = static_cast<double>(target_rank_) / static_cast<double>(n);
    AdmmState s;
    s.K = fill * DenseMatrix::identity(n);
    s.X = s.K;
    s.Z = s.K;
    s.M = s.K;
    s.L1 = DenseMatrix(n, n);
    s.L2 = DenseMatrix(n, n);
    s.L3 = DenseMatrix(n, n);
    return s;
}

void ModeSolver::update_k(AdmmState& state) const {
    // B = (P + Q) (A A^T + (rho1+rho2+rho3) I)^{-1} with
    // P = A A^T + L1 + L2 + L3, Q = rho1 X + rho2 Z + rho3 M;
    // then shift the trace back to the target rank.
    DenseMatrix rhs = gram_ + state.L1 + state.L2 + state.L3;
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs.values()[i] += params_.rho1 * state.X.values()[i] +
                           params_.rho2 * state.Z.values()[i] +
                           params_.rho3 * state.M.values()[i];
    state.K = trace_shift(shifted_gram_.solve_right(rhs),
                          static_cast<double>(target_rank_));
}

void ModeSolver::update_blocks(AdmmState& state) const {
    const auto target = [&state](const DenseMatrix& mult, double rho) {
        DenseMatrix t = state.K;
        for (std::size_t i = 0; i < t.size(); ++i) t.values()[i] -= mult.values()[i] / rho;
        return t;
    };
    state.X = shrinkage(target(state.L1, params_.rho1), params_.theta / params_.rho1);
    state.Z = project_nonneg(target(state.L2, params_.rho2));
    const DenseMatrix m_target = target(state.L3, params_.rho3);
    state.M = params_.literal_m_projection ? project_sym_box_psd_literal(m_target)
                                           : project_sym_box_psd(m_target);
}

void ModeSolver::update_multipliers(AdmmState& state) const {
    const double g = params_.gamma;
    for (std::size_t i = 0; i < state.K.size(); ++i) {
        const double k = state.K.values()[i];
        state.L1.values()[i] -= g * params_.rho1 * (k - state.X.values()[i]);
        state.L2.values()[i] -= g * params_.rho2 * (k - state.Z.values()[i]);
        state.L3.values()[i] -= g * params_.rho3 * (k - state.M.values()[i]);
    }
}

ModeSolver::Result ModeSolver::run() const {
    AdmmState state = init_state();
    bool converged = false;

    for (std::size_t it = 1; it <= params_.max_iter; ++it) {
        const DenseMatrix k_prev = state.K;
        update_k(state);
        update_blocks(state);
        update_multipliers(state);
        state.iter = it;

        const std::array<double, 3> resid{frob_norm(state.K - state.X),
                                          frob_norm(state.K - state.Z),
                                          frob_norm(state.K - state.M)};
        state.residual_history.push_back(resid);
        state.objective_history.push_back(
            admm_objective(state.K, state.X, unfolding_, params_.theta));

        const double scale = std::max(1.0, frob_norm(state.K));
        const double worst = std::max({resid[0], resid[1], resid[2]});
        const double step = frob_norm(state.K - k_prev);
        // The primal residual alone is degenerate right after the identical
        // initialization (it is exactly zero before the multipliers move),
        // so the K-step change must also settle under the same eps.
        if (worst <= params_.eps * scale && step <= params_.eps * scale) {
            converged = true;
            break;
        }
    }

    Result r{state.K, {}};
    r.diagnostics.iterations = state.iter;
    r.diagnostics.converged = converged;
    r.diagnostics.asymmetry = frob_norm(state.K - transpose(state.K));
    r.diagnostics.residual_history = std::move(state.residual_history);
    r.diagnostics.objective_history = std::move(state.objective_history);
    return r;
}

}  // namespace ontd
