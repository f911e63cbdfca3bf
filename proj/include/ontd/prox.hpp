#pragma once

#include "ontd/tensor.hpp"

namespace ontd {

/// Elementwise soft threshold: sign(x) * max(|x| - tau, 0).
DenseMatrix shrinkage(const DenseMatrix& x, double tau);

/// Elementwise max(x, 0).
DenseMatrix project_nonneg(const DenseMatrix& x);

/// Euclidean projection onto {M : M = M^T, 0 <= eig(M) <= 1}:
/// symmetrize, eigendecompose, clip the spectrum to [0, 1], reassemble.
DenseMatrix project_sym_box_psd(const DenseMatrix& b);

/// Literal transcription of the printed M-update: eigendecompose the SUM
/// B + B^T (not its half), clip to [0, 1], scale by 1/2. Bounds the
/// spectrum by 1/2 and is not the Euclidean projection; kept behind a
/// diagnostic switch for A/B comparison.
DenseMatrix project_sym_box_psd_literal(const DenseMatrix& b);

/// Shift along the identity so the trace equals `target_trace`:
/// B - (tr(B) - target_trace)/n * I.
DenseMatrix trace_shift(const DenseMatrix& b, double target_trace);

}  // namespace ontd
