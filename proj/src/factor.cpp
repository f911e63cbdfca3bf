#include "ontd/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ontd/errors.hpp"
#include "ontd/linalg.hpp"
#include "ontd/rng.hpp"

namespace ontd {

FactorMatrix FactorMatrix::from_matrix(DenseMatrix m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    if (rows == 0 || cols == 0 || cols > rows)
        throw std::invalid_argument("FactorMatrix: need 1 <= cols <= rows");
    for (double v : m.values())
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("FactorMatrix: entries must be finite and nonnegative");
    for (std::size_t i = 0; i < rows; ++i) {
        std::size_t nonzeros = 0;
        for (std::size_t j = 0; j < cols; ++j)
            if (m(i, j) > kRowSupportTol) ++nonzeros;
        if (nonzeros > 1)
            throw std::invalid_argument("FactorMatrix: row " + std::to_string(i) +
                                        " has more than one nonzero entry");
    }
    const DenseMatrix gram = transpose(m) * m;
    for (std::size_t a = 0; a < cols; ++a)
        for (std::size_t b = 0; b < cols; ++b) {
            const double want = a == b ? 1.0 : 0.0;
            if (std::abs(gram(a, b) - want) > kOrthoTol)
                throw std::invalid_argument("FactorMatrix: columns are not orthonormal");
        }
    return FactorMatrix(std::move(m));
}

std::vector<std::vector<std::size_t>> FactorMatrix::column_supports() const {
    std::vector<std::vector<std::size_t>> supports(cols());
    for (std::size_t i = 0; i < rows(); ++i)
        for (std::size_t j = 0; j < cols(); ++j)
            if (m_(i, j) > kRowSupportTol) supports[j].push_back(i);
    return supports;
}

namespace {

double sq_dist(const DenseMatrix& points, std::size_t row, const std::vector<double>& center) {
    double s = 0.0;
    for (std::size_t c = 0; c < points.cols(); ++c) {
        const double d = points(row, c) - center[c];
        s += d * d;
    }
    return s;
}

struct KmeansRun {
    std::vector<int> labels;
    double wcss = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const DenseMatrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows(), dim = points.cols();

    // k-means++ seeding
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    {
        const std::size_t first = rng.index(n);
        centers.emplace_back(points.values().begin() + first * dim,
                             points.values().begin() + (first + 1) * dim);
        std::vector<double> d2(n);
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& ctr : centers) best = std::min(best, sq_dist(points, i, ctr));
                d2[i] = best;
                total += best;
            }
            std::size_t pick;
            if (total > 0.0) {
                const double u = rng.uniform() * total;
                double acc = 0.0;
                pick = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (u < acc) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = rng.index(n);
            }
            centers.emplace_back(points.values().begin() + pick * dim,
                                 points.values().begin() + (pick + 1) * dim);
        }
    }

    std::vector<int> labels(n, -1);
    for (int pass = 0; pass < 100; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bestd = sq_dist(points, i, centers[0]);
            for (std::size_t j = 1; j < k; ++j) {
                const double d = sq_dist(points, i, centers[j]);
                if (d < bestd) {
                    bestd = d;
                    best = static_cast<int>(j);
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        // repair empty clusters with the point farthest from its centroid
        for (std::size_t j = 0; j < k; ++j) {
            if (std::count(labels.begin(), labels.end(), static_cast<int>(j)) > 0) continue;
            std::size_t far = 0;
            double fard = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = sq_dist(points, i, centers[labels[i]]);
                if (d > fard) {
                    fard = d;
                    far = i;
                }
            }
            labels[far] = static_cast<int>(j);
            changed = true;
        }
        // recompute centroids
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
            for (std::size_t c = 0; c < dim; ++c) sums[labels[i]][c] += points(i, c);
        }
        for (std::size_t j = 0; j < k; ++j)
            if (counts[j] > 0)
                for (std::size_t c = 0; c < dim; ++c)
                    centers[j][c] = sums[j][c] / static_cast<double>(counts[j]);
        if (!changed) break;
    }

    KmeansRun out;
    out.labels = labels;
    out.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) out.wcss += sq_dist(points, i, centers[labels[i]]);
    return out;
}

}  // namespace

ClusterAssignment kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows();
    if (k == 0 || k > n) throw std::invalid_argument("kmeans: k out of range");

    KmeansRun best;
    for (std::uint64_t restart = 0; restart < 10; ++restart) {
        Rng rng(derive_seed(seed, restart));
        KmeansRun run = kmeans_once(points, k, rng);
        if (run.wcss < best.wcss) best = std::move(run);
    }

    ClusterAssignment out;
    out.labels = std::move(best.labels);
    out.sizes.assign(k, 0);
    out.index_sets.assign(k, {});
    for (std::size_t i = 0; i < n; ++i) {
        const int lab = out.labels[i];
        if (lab >= 0) {
            ++out.sizes[lab];
            out.index_sets[lab].push_back(i);
        }
    }
    return out;
}

FactorMatrix recover_factor(const DenseMatrix& k, std::size_t target_rank, std::uint64_t seed) {
    if (k.rows() != k.cols()) throw std::invalid_argument("recover_factor: K must be square");
    const std::size_t n = k.rows();
    if (target_rank == 0 || target_rank > n)
        throw std::invalid_argument("recover_factor: target rank out of range");

    DenseMatrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (k(i, j) + k(j, i));

    const EigenPair eig = sym_eig(sym);
    DenseMatrix embedding(n, target_rank);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < target_rank; ++j) embedding(i, j) = eig.vectors(i, j);

    const ClusterAssignment clusters = kmeans(embedding, target_rank, seed);

    DenseMatrix u(n, target_rank);
    for (std::size_t j = 0; j < target_rank; ++j) {
        const auto& members = clusters.index_sets[j];
        if (members.empty())
            throw NumericalError("recover_factor: cluster " + std::to_string(j) +
                                 " is empty after repair; projector is too degenerate");
        const std::size_t l = members.size();
        DenseMatrix sub(l, l);
        for (std::size_t a = 0; a < l; ++a)
            for (std::size_t b = 0; b < l; ++b) sub(a, b) = sym(members[a], members[b]);
        const EigenPair sub_eig = sym_eig(sub);
        double norm = 0.0;
        for (std::size_t a = 0; a < l; ++a) {
            const double v = std::abs(sub_eig.vectors(a, 0));
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0)
            throw NumericalError("recover_factor: zero leading eigenvector in cluster " +
                                 std::to_string(j));
        for (std::size_t a = 0; a < l; ++a)
            u(members[a], j) = std::abs(sub_eig.vectors(a, 0)) / norm;
    }
    return FactorMatrix::from_matrix(std::move(u));
}

FactorMatrix exact_factor_from_unfolding(const DenseMatrix& unfolding, std::size_t target_rank,
                                         double tol) {
    const std::size_t n = unfolding.rows(), w = unfolding.cols();
    if (target_rank == 0 || target_rank > n)
        throw std::invalid_argument("exact_factor_from_unfolding: target rank out of range");

    std::vector<double> row_norm(n, 0.0);
    double max_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < w; ++c) s += unfolding(i, c) * unfolding(i, c);
        row_norm[i] = std::sqrt(s);
        max_norm = std::max(max_norm, row_norm[i]);
    }
    const double zero_thresh = 1e-12 * max_norm;

    // Greedy proportionality grouping against each group's first row.
    std::vector<std::size_t> group_rep;            // representative row per group
    std::vector<std::vector<std::size_t>> groups;  // member rows per group
    for (std::size_t i = 0; i < n; ++i) {
        if (row_norm[i] <= zero_thresh) continue;
        bool placed = false;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const std::size_t r = group_rep[g];
            double dot = 0.0;
            for (std::size_t c = 0; c < w; ++c) dot += unfolding(i, c) * unfolding(r, c);
            const double cosine = dot / (row_norm[i] * row_norm[r]);
            if (cosine >= 1.0 - tol) {
                groups[g].push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            group_rep.push_back(i);
            groups.push_back({i});
        }
    }

    if (groups.size() != target_rank)
        throw NumericalError("exact_factor_from_unfolding: found " +
                             std::to_string(groups.size()) + " proportional row groups, expected " +
                             std::to_string(target_rank) +
                             "; input is not orthogonally decomposable at this tolerance");

    DenseMatrix u(n, target_rank);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double rss = 0.0;
        for (std::size_t i : groups[g]) rss += row_norm[i] * row_norm[i];
        rss = std::sqrt(rss);
        for (std::size_t i : groups[g]) u(i, g) = row_norm[i] / rss;
    }
    return FactorMatrix::from_matrix(std::move(u));
}

FactorMatch match_factors(const FactorMatrix& u, const FactorMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("match_factors: shape mismatch");
    const std::size_t j = u.cols();
    const DenseMatrix c = transpose(u.matrix()) * v.matrix();

    struct Entry {
        double value;
        std::size_t i, k;
    };
    std::vector<Entry> entries;
    entries.reserve(j * j);
    for (std::size_t i = 0; i < j; ++i)
        for (std::size_t k = 0; k < j; ++k) entries.push_back({std::abs(c(i, k)), i, k});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.i != b.i) return a.i < b.i;
        return a.k < b.k;
    });

    std::vector<std::size_t> perm(j, j);
    std::vector<bool> used_u(j, false), used_v(j, false);
    std::size_t matched = 0;
    for (const Entry& e : entries) {
        if (matched == j) break;
        if (used_u[e.i] || used_v[e.k]) continue;
        perm[e.i] = e.k;
        used_u[e.i] = true;
        used_v[e.k] = true;
        ++matched;
    }

    FactorMatch out;
    out.permutation = std::move(perm);
    for (std::size_t i = 0; i < j; ++i)
        for (std::size_t r = 0; r < u.rows(); ++r)
            out.max_error = std::max(out.max_error,
                                     std::abs(u.matrix()(r, i) -
                                              v.matrix()(r, out.permutation[i])));
    return out;
}

}  // namespace ontd
