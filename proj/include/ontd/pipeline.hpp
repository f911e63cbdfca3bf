#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ontd/admm.hpp"
#include "ontd/core_solver.hpp"

namespace ontd {

struct StageTimes {
    double admm_seconds = 0.0;
    double recovery_seconds = 0.0;
    double core_seconds = 0.0;
    double total_seconds = 0.0;
    std::vector<double> per_mode_admm_seconds;
};

struct DecomposeReport {
    OntdModel model;
    /// One entry per mode; disengaged for identity modes.
    std::vector<std::optional<ModeDiagnostics>> mode_diagnostics;
    double relative_error = 0.0;
    double compression_ratio = 0.0;
    double space_savings = 0.0;
    std::size_t clamped_negatives = 0;
    double max_orthonormality_defect = 0.0;
    std::vector<std::string> warnings;
    StageTimes times;
};

/// Full or partial decomposition: for every non-identity mode, unfold,
/// run the ADMM projector solve, recover the factor; then the core solve,
/// reconstruction and metrics. Identity modes (listed in identity_modes,
/// 0-based) require ranks[n] == dims[n]. Deterministic given
/// (input, ranks, params, seed); parallel_modes only changes scheduling.
DecomposeReport decompose(const DenseTensor& a, const std::vector<std::size_t>& ranks,
                          const std::vector<std::size_t>& identity_modes, const AdmmParams& params,
                          std::uint64_t seed, bool parallel_modes = false);

/// Mean relative reconstruction error over a batch.
double avg_error(const std::vector<DenseTensor>& originals,
                 const std::vector<DenseTensor>& reconstructions);

/// Stored-parameter count (prod J + sum I_n J_n) over the dense size.
double compression_ratio(const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& ranks);
double space_savings(const std::vector<std::size_t>& dims,
                     const std::vector<std::size_t>& ranks);

/// Mean cosine between extracted and truth feature vectors after greedy
/// matching (same assignment rule as match_factors).
double similarity(const std::vector<std::vector<double>>& extracted,
                  const std::vector<std::vector<double>>& truth);

/// Hard-clustering features from a partial model with the factor on mode
/// 0: every position of the remaining grid is assigned to the core slice
/// with the largest value (lowest slice index wins ties); feature i is the
/// binary map of positions assigned to slice i.
std::vector<std::vector<double>> extract_features(const OntdModel& model);

}  // namespace ontd
