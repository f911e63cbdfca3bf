#include "ontd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ontd/factor.hpp"
#include "ontd/rng.hpp"

namespace ontd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ModeOutcome {
    std::optional<FactorMatrix> factor;
    std::optional<ModeDiagnostics> diagnostics;
    double admm_seconds = 0.0;
    double recovery_seconds = 0.0;
};

ModeOutcome solve_mode(const DenseTensor& a, std::size_t mode, std::size_t rank,
                       const AdmmParams& params, std::uint64_t seed) {
    ModeOutcome out;
    const auto admm_start = Clock::now();
    ModeSolver solver(unfold(a, mode), rank, params);
    ModeSolver::Result result = solver.run();
    out.admm_seconds = seconds_since(admm_start);

    const auto rec_start = Clock::now();
    out.factor = recover_factor(result.projector, rank, derive_seed(seed, mode));
    out.recovery_seconds = seconds_since(rec_start);
    out.diagnostics = std::move(result.diagnostics);
    return out;
}

}  // namespace

DecomposeReport decompose(const DenseTensor& a, const std::vector<std::size_t>& ranks,
                          const std::vector<std::size_t>& identity_modes, const AdmmParams& params,
                          std::uint64_t seed, bool parallel_modes) {
    const std::size_t d = a.order();
    if (ranks.size() != d) throw std::invalid_argument("decompose: one rank per mode required");
    params.validate();

    std::vector<bool> is_identity(d, false);
    for (std::size_t m : identity_modes) {
        if (m >= d) throw std::invalid_argument("decompose: identity mode out of range");
        is_identity[m] = true;
    }
    for (std::size_t n = 0; n < d; ++n) {
        if (ranks[n] == 0 || ranks[n] > a.dim(n))
            throw std::invalid_argument("decompose: ranks must satisfy 1 <= J_n <= I_n");
        if (is_identity[n] && ranks[n] != a.dim(n))
            throw std::invalid_argument("decompose: identity modes require J_n == I_n");
    }

    const auto total_start = Clock::now();
    std::vector<ModeOutcome> outcomes(d);

    if (parallel_modes) {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(d);
        for (std::size_t n = 0; n < d; ++n) {
            if (is_identity[n]) continue;
            workers.emplace_back([&, n]() {
                try {
                    outcomes[n] = solve_mode(a, n, ranks[n], params, seed);
                } catch (...) {
                    errors[n] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::size_t n = 0; n < d; ++n)
            if (!is_identity[n]) outcomes[n] = solve_mode(a, n, ranks[n], params, seed);
    }

    DecomposeReport report;
    std::vector<std::optional<FactorMatrix>> factors;
    factors.reserve(d);
    for (std::size_t n = 0; n < d; ++n) {
        report.times.per_mode_admm_seconds.push_back(outcomes[n].admm_seconds);
        report.times.admm_seconds += outcomes[n].admm_seconds;
        report.times.recovery_seconds += outcomes[n].recovery_seconds;
        if (outcomes[n].diagnostics && !outcomes[n].diagnostics->converged)
            report.warnings.push_back("mode " + std::to_string(n + 1) + ": ADMM hit max_iter (" +
                                      std::to_string(params.max_iter) +
                                      ") before reaching the stopping criterion");
        report.mode_diagnostics.push_back(std::move(outcomes[n].diagnostics));
        factors.push_back(std::move(outcomes[n].factor));
    }

    const auto core_start = Clock::now();
    CoreSolveResult core = solve_core(a, factors);
    report.times.core_seconds = seconds_since(core_start);
    report.clamped_negatives = core.clamped_negatives;
    report.max_orthonormality_defect = core.max_orthonormality_defect;
    if (core.max_orthonormality_defect > 1e-6)
        report.warnings.push_back("a supplied factor misses U^T U = I by " +
                                  std::to_string(core.max_orthonormality_defect) +
                                  "; the orthonormal core shortcut is approximate");

    report.model = OntdModel{std::move(core.core), std::move(factors)};
    const DenseTensor rebuilt = reconstruct(report.model);
    double diff_sq = 0.0, orig_sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double dd = a[k] - rebuilt[k];
        diff_sq += dd * dd;
        orig_sq += a[k] * a[k];
    }
    report.relative_error = orig_sq > 0.0 ? std::sqrt(diff_sq / orig_sq) : 0.0;
    report.compression_ratio = compression_ratio(a.dims(), ranks);
    report.space_savings = space_savings(a.dims(), ranks);
    report.times.total_seconds = seconds_since(total_start);
    return report;
}

double avg_error(const std::vector<DenseTensor>& originals,
                 const std::vector<DenseTensor>& reconstructions) {
    if (originals.empty()) throw std::invalid_argument("avg_error: empty list");
    if (originals.size() != reconstructions.size())
        throw std::invalid_argument("avg_error: list lengths differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < originals.size(); ++i) {
        if (originals[i].dims() != reconstructions[i].dims())
            throw std::invalid_argument("avg_error: shape mismatch at item " + std::to_string(i));
        double diff_sq = 0.0, orig_sq = 0.0;
        for (std::size_t k = 0; k < originals[i].size(); ++k) {
            const double dd = originals[i][k] - reconstructions[i][k];
            diff_sq += dd * dd;
            orig_sq += originals[i][k] * originals[i][k];
        }
        sum += orig_sq > 0.0 ? std::sqrt(diff_sq / orig_sq) : 0.0;
    }
    return sum / static_cast<double>(originals.size());
}

double compression_ratio(const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& ranks) {
    if (dims.size() != ranks.size() || dims.empty())
        throw std::invalid_argument("compression_ratio: dims and ranks must match");
    double stored = 1.0, original = 1.0;
    for (std::size_t j : ranks) stored *= static_cast<double>(j);
    for (std::size_t n = 0; n < dims.size(); ++n) {
        stored += static_cast<double>(dims[n]) * static_cast<double>(ranks[n]);
        original *= static_cast<double>(dims[n]);
    }
    return stored / original;
}

double space_savings(const std::vector<std::size_t>& dims,
                     const std::vector<std::size_t>& ranks) {
    return 1.0 - compression_ratio(dims, ranks);
}

double similarity(const std::vector<std::vector<double>>& extracted,
                  const std::vector<std::vector<double>>& truth) {
    if (extracted.empty() || extracted.size() != truth.size())
        throw std::invalid_argument("similarity: feature counts must match and be nonzero");
    const std::size_t r = extracted.size();

    std::vector<double> en(r), tn(r);
    for (std::size_t i = 0; i < r; ++i) {
        double s = 0.0;
        for (double v : extracted[i]) s += v * v;
        en[i] = std::sqrt(s);
        s = 0.0;
        for (double v : truth[i]) s += v * v;
        tn[i] = std::sqrt(s);
        if (en[i] == 0.0 || tn[i] == 0.0)
            throw std::invalid_argument("similarity: zero-norm feature");
        if (extracted[i].size() != truth[0].size())
            throw std::invalid_argument("similarity: feature lengths differ");
    }

    DenseMatrix cosine(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < extracted[i].size(); ++k)
                dot += extracted[i][k] * truth[j][k];
            cosine(i, j) = dot / (en[i] * tn[j]);
        }

    struct Entry {
        double value;
        std::size_t i, j;
    };
    std::vector<Entry> entries;
    entries.reserve(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) entries.push_back({cosine(i, j), i, j});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    std::vector<bool> used_i(r, false), used_j(r, false);
    double total = 0.0;
    std::size_t matched = 0;
    for (const Entry& e : entries) {
        if (matched == r) break;
        if (used_i[e.i] || used_j[e.j]) continue;
        used_i[e.i] = true;
        used_j[e.j] = true;
        total += e.value;
        ++matched;
    }
    return total / static_cast<double>(r);
}

std::vector<std::vector<double>> extract_features(const OntdModel& model) {
    if (model.order() < 2 || !model.factors[0])
        throw std::invalid_argument("extract_features: model needs a factor on mode 1");
    for (std::size_t n = 1; n < model.order(); ++n)
        if (model.factors[n])
            throw std::invalid_argument(
                "extract_features: all modes beyond the first must be identity");

    const std::size_t r = model.core.dim(0);
    const std::size_t positions = model.core.size() / r;
    std::vector<std::vector<double>> features(r, std::vector<double>(positions, 0.0));
    for (std::size_t p = 0; p < positions; ++p) {
        std::size_t best = 0;
        double best_v = model.core[p];
        for (std::size_t i = 1; i < r; ++i) {
            const double v = model.core[i * positions + p];
            if (v > best_v) {
                best_v = v;
                best = i;
            }
        }
        features[best][p] = 1.0;
    }
    return features;
}

}  // namespace ontd
