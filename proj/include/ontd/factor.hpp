#pragma once

#include <cstdint>
#include <vector>

#include "ontd/tensor.hpp"

namespace ontd {

/// Nonnegative matrix with orthonormal columns and at most one nonzero
/// per row. Construction validates all three invariants; the recovery
/// and generator paths satisfy them exactly by construction.
class FactorMatrix {
public:
    static constexpr double kOrthoTol = 1e-8;
    static constexpr double kRowSupportTol = 1e-10;

    /// Validates and wraps; throws std::invalid_argument on violation.
    static FactorMatrix from_matrix(DenseMatrix m);

    const DenseMatrix& matrix() const { return m_; }
    std::size_t rows() const { return m_.rows(); }
    std::size_t cols() const { return m_.cols(); }

    /// Row index sets per column (entries above kRowSupportTol).
    std::vector<std::vector<std::size_t>> column_supports() const;

private:
    explicit FactorMatrix(DenseMatrix m) : m_(std::move(m)) {}
    DenseMatrix m_;
};

/// Row-index -> cluster-label map. label -1 marks an unassigned row.
struct ClusterAssignment {
    std::vector<int> labels;
    std::vector<std::size_t> sizes;
    std::vector<std::vector<std::size_t>> index_sets;
};

/// Lloyd iterations with k-means++ seeding, 10 restarts, best
/// within-cluster sum of squares kept; empty clusters repaired by
/// reassigning the farthest point. Deterministic given the seed.
ClusterAssignment kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed);

/// Projector -> factor: top-J eigenvectors of the symmetrized K, k-means
/// over their rows, then per cluster the leading eigenvector of the
/// principal submatrix K[T_j, T_j] (entrywise absolute value, unit
/// normalized) becomes column j's support values.
FactorMatrix recover_factor(const DenseMatrix& k, std::size_t target_rank, std::uint64_t seed);

/// Closed-form factor recovery for an exactly orthogonally decomposable
/// unfolding: group nonzero rows by proportionality (cosine >= 1 - tol),
/// entry for row t is ||row_t||_2 normalized by its group's
/// root-sum-of-squares. Requires exactly `target_rank` groups.
FactorMatrix exact_factor_from_unfolding(const DenseMatrix& unfolding, std::size_t target_rank,
                                         double tol = 1e-8);

struct FactorMatch {
    /// permutation[i] = column of V matched to column i of U.
    std::vector<std::size_t> permutation;
    double max_error = 0.0;  // ||U - V Pi||_max
};

/// Greedy maximum matching on the column-similarity matrix |U^T V|.
FactorMatch match_factors(const FactorMatrix& u, const FactorMatrix& v);

}  // namespace ontd
