#include "ontd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ontd/rng.hpp"

namespace ontd {

namespace {

void add_clamped_noise(std::vector<double>& values, double level, Rng& rng) {
    std::vector<double> noise(values.size());
    double raw = 0.0, signal = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        noise[i] = rng.normal();
        raw += noise[i] * noise[i];
        signal += values[i] * values[i];
    }
    if (raw == 0.0 || signal == 0.0) return;
    const double scale = level * std::sqrt(signal) / std::sqrt(raw);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::max(values[i] + scale * noise[i], 0.0);
}

}  // namespace

FactorMatrix gen_factor(std::size_t rows, std::size_t cols, std::uint64_t seed,
                        std::size_t min_cluster_size) {
    if (cols == 0 || min_cluster_size == 0 || cols * min_cluster_size > rows)
        throw std::invalid_argument("gen_factor: infeasible sizes");
    Rng rng(seed);

    std::vector<std::size_t> labels(rows);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t m = 0; m < min_cluster_size; ++m) labels[j * min_cluster_size + m] = j;
    for (std::size_t i = cols * min_cluster_size; i < rows; ++i) labels[i] = rng.index(cols);
    for (std::size_t i = rows; i-- > 1;) std::swap(labels[i], labels[rng.index(i + 1)]);

    DenseMatrix u(rows, cols);
    std::vector<double> col_sq(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        const double v = rng.uniform(0.5, 1.5);
        u(i, labels[i]) = v;
        col_sq[labels[i]] += v * v;
    }
    for (std::size_t i = 0; i < rows; ++i)
        u(i, labels[i]) /= std::sqrt(col_sq[labels[i]]);
    return FactorMatrix::from_matrix(std::move(u));
}

SynthInstance gen_tensor(const SynthSpec& spec) {
    if (spec.dims.size() != spec.ranks.size() || spec.dims.empty())
        throw std::invalid_argument("gen_tensor: dims and ranks must be equal-length, nonempty");
    for (std::size_t n = 0; n < spec.dims.size(); ++n)
        if (spec.ranks[n] == 0 || spec.ranks[n] > spec.dims[n])
            throw std::invalid_argument("gen_tensor: ranks must satisfy 1 <= J_n <= I_n");

    std::vector<std::optional<FactorMatrix>> factors;
    factors.reserve(spec.dims.size());
    for (std::size_t n = 0; n < spec.dims.size(); ++n)
        factors.emplace_back(gen_factor(spec.dims[n], spec.ranks[n],
                                        derive_seed(spec.seed, 100 + n),
                                        spec.min_cluster_size));

    Rng core_rng(derive_seed(spec.seed, 7));
    std::vector<double> core_values;
    std::size_t core_size = 1;
    for (std::size_t j : spec.ranks) core_size *= j;
    core_values.reserve(core_size);
    for (std::size_t i = 0; i < core_size; ++i) core_values.push_back(core_rng.uniform());

    OntdModel truth{DenseTensor(spec.ranks, std::move(core_values)), std::move(factors)};
    DenseTensor a = reconstruct(truth);

    if (spec.noise_level > 0.0) {
        std::vector<double> values(a.values().begin(), a.values().end());
        Rng noise_rng(derive_seed(spec.seed, 13));
        add_clamped_noise(values, spec.noise_level, noise_rng);
        a = DenseTensor(a.dims(), std::move(values));
    }
    return SynthInstance{std::move(a), std::move(truth)};
}

UnmixingInstance gen_unmixing(std::size_t bands, std::size_t rows, std::size_t cols,
                              std::size_t r, std::uint64_t seed, double noise_level) {
    if (r == 0 || r > bands) throw std::invalid_argument("gen_unmixing: need 1 <= r <= bands");
    if (rows == 0 || cols == 0) throw std::invalid_argument("gen_unmixing: empty grid");
    if (r > rows * cols) throw std::invalid_argument("gen_unmixing: more materials than pixels");
    Rng rng(derive_seed(seed, 1));

    // r distinct Voronoi centers; ties go to the lowest material index, and
    // each center claims its own cell, so every mask is nonempty.
    const std::size_t npix = rows * cols;
    std::vector<std::size_t> cells(npix);
    for (std::size_t i = 0; i < npix; ++i) cells[i] = i;
    for (std::size_t i = 0; i < r; ++i) std::swap(cells[i], cells[i + rng.index(npix - i)]);

    std::vector<std::vector<double>> masks(r, std::vector<double>(npix, 0.0));
    std::vector<std::size_t> owner(npix);
    for (std::size_t p = 0; p < npix; ++p) {
        const long px = static_cast<long>(p / cols), py = static_cast<long>(p % cols);
        std::size_t best = 0;
        long best_d = -1;
        for (std::size_t m = 0; m < r; ++m) {
            const long cx = static_cast<long>(cells[m] / cols);
            const long cy = static_cast<long>(cells[m] % cols);
            const long d = (px - cx) * (px - cx) + (py - cy) * (py - cy);
            if (best_d < 0 || d < best_d) {
                best_d = d;
                best = m;
            }
        }
        owner[p] = best;
        masks[best][p] = 1.0;
    }

    // Spectra on disjoint contiguous band blocks.
    DenseMatrix spectra(r, bands);
    for (std::size_t m = 0; m < r; ++m) {
        const std::size_t lo = m * bands / r;
        const std::size_t hi = (m + 1) * bands / r;
        for (std::size_t b = lo; b < hi; ++b) spectra(m, b) = rng.uniform(0.5, 1.5);
    }

    std::vector<double> values(bands * npix, 0.0);
    for (std::size_t b = 0; b < bands; ++b)
        for (std::size_t p = 0; p < npix; ++p)
            values[b * npix + p] = spectra(owner[p], b);
    if (noise_level > 0.0) {
        Rng noise_rng(derive_seed(seed, 2));
        add_clamped_noise(values, noise_level, noise_rng);
    }
    return UnmixingInstance{DenseTensor({bands, rows, cols}, std::move(values)),
                            std::move(masks), std::move(spectra)};
}

}  // namespace ontd
