#pragma once

#include <cstdint>
#include <vector>

#include "ontd/core_solver.hpp"
#include "ontd/factor.hpp"
#include "ontd/tensor.hpp"

namespace ontd {

struct SynthSpec {
    std::vector<std::size_t> dims;
    std::vector<std::size_t> ranks;
    std::uint64_t seed = 0;
    double noise_level = 0.0;  // relative Frobenius norm of the added noise
    std::size_t min_cluster_size = 1;
};

/// Random valid factor: surjective row-to-cluster assignment (every
/// cluster at least min_cluster_size rows), entries uniform(0.5, 1.5),
/// columns unit-normalized.
FactorMatrix gen_factor(std::size_t rows, std::size_t cols, std::uint64_t seed,
                        std::size_t min_cluster_size = 1);

struct SynthInstance {
    DenseTensor tensor;
    OntdModel truth;
};

/// Ground-truth instance: core entries uniform(0, 1), tensor equal to the
/// exact reconstruction plus optional nonnegative-clamped Gaussian noise
/// scaled to the requested relative Frobenius level.
SynthInstance gen_tensor(const SynthSpec& spec);

struct UnmixingInstance {
    DenseTensor tensor;  // bands x rows x cols
    /// r binary masks over the rows*cols grid (row-major), partitioning it.
    std::vector<std::vector<double>> masks;
    DenseMatrix spectra;  // r x bands, disjoint dominant supports
};

/// Unmixing-style instance: r Voronoi spatial masks, r spectra supported
/// on disjoint band blocks, cube A[b, x, y] = spectrum of the material at
/// (x, y) evaluated at band b, plus clamped noise.
UnmixingInstance gen_unmixing(std::size_t bands, std::size_t rows, std::size_t cols,
                              std::size_t r, std::uint64_t seed, double noise_level = 0.0);

}  // namespace ontd
