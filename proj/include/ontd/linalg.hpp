#pragma once

#include <vector>

#include "ontd/tensor.hpp"

namespace ontd {

/// Full spectrum of a symmetric matrix, eigenvalues sorted descending
/// (ties kept in original index order), column k of `vectors` the unit
/// eigenvector for values[k]. Columns are sign-fixed so the
/// largest-magnitude entry of each is nonnegative.
struct EigenPair {
    std::vector<double> values;
    DenseMatrix vectors;
};

/// Cyclic Jacobi eigensolver. The input is symmetrized; asymmetry beyond
/// 1e-8 * max(1, ||S||_F) is rejected. Off-diagonal Frobenius threshold
/// 1e-12 * max(1, ||S||_F), sweep cap 100.
EigenPair sym_eig(const DenseMatrix& s);

/// Cholesky factorization of a symmetric positive-definite matrix,
/// computed once and reusable for many right-hand sides.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const DenseMatrix& a);

    std::size_t dim() const { return lower_.rows(); }

    /// Solve A X = B.
    DenseMatrix solve(const DenseMatrix& b) const;

    /// Solve X A = B (equivalently A X^T = B^T with A symmetric).
    DenseMatrix solve_right(const DenseMatrix& b) const;

private:
    DenseMatrix lower_;
};

/// One-shot SPD solve A X = B.
DenseMatrix spd_solve(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace ontd
