#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ontd/factor.hpp"
#include "ontd/tensor.hpp"

namespace ontd {

/// Core tensor plus per-mode factor; a disengaged optional marks an
/// identity factor (partial decomposition).
struct OntdModel {
    DenseTensor core;
    std::vector<std::optional<FactorMatrix>> factors;

    std::size_t order() const { return factors.size(); }
    /// Dims of the reconstructed tensor (factor rows, or core dim where
    /// the factor is the identity).
    std::vector<std::size_t> output_dims() const;
    std::vector<std::size_t> ranks() const { return core.dims(); }
};

struct CoreSolveResult {
    DenseTensor core;
    /// Entries below zero clamped during the nonnegativity projection.
    std::size_t clamped_negatives = 0;
    /// max |U^T U - I| over supplied factors; > 1e-6 flags a factor that
    /// is not orthonormal enough for the mode-product shortcut.
    double max_orthonormality_defect = 0.0;
};

/// Least-squares core for column-orthonormal factors. Since U^T U = I for
/// every factor, the normal equations collapse to the chain of mode
/// products with transposed factors; no Kronecker matrix is formed.
/// Negative round-off values are clamped to zero and counted.
CoreSolveResult solve_core(const DenseTensor& a,
                           const std::vector<std::optional<FactorMatrix>>& factors);

/// core x_0 U_0 ... x_{d-1} U_{d-1} with identity modes skipped.
DenseTensor reconstruct(const OntdModel& model);

/// Per-class norm pairs (||S_(n)(j,:)||_F, ||A_(n)(T_j,:)||_F) for mode n;
/// an identity mode uses singleton row sets. Supports the row-norm
/// preservation checks on exactly decomposable tensors.
std::vector<std::pair<double, double>> rowwise_norm_check(const DenseTensor& a,
                                                          const OntdModel& model,
                                                          std::size_t mode);

}  // namespace ontd
