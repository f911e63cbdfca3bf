#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ontd/core_solver.hpp"
#include "ontd/pipeline.hpp"
#include "ontd/tensor.hpp"

namespace ontd {

enum class TensorFormat { text, binary };

TensorFormat parse_format(const std::string& name);  // "text" | "binary"
std::string format_extension(TensorFormat f);        // ".dtt" | ".dttb"

/// Text format "DTT": magic line, order, dims line, then the values in
/// last-index-fastest order, printed with 17 significant digits. Binary
/// format "DTTB": magic bytes, little-endian u32 order and dims, then
/// little-endian IEEE-754 doubles in the same order. Reads reject bad
/// magic, count mismatches and non-finite values.
DenseTensor read_tensor(const std::filesystem::path& path);
void write_tensor(const DenseTensor& t, const std::filesystem::path& path, TensorFormat format);

/// Comma-separated, one row per line, no header, 17 significant digits.
DenseMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const DenseMatrix& m, const std::filesystem::path& path);

/// Model directory: core tensor, factor_<n>.csv per non-identity mode
/// (1-based naming) and a model.txt manifest naming dims, ranks and the
/// identity modes.
void write_model(const OntdModel& model, const std::filesystem::path& dir, TensorFormat format);
OntdModel read_model(const std::filesystem::path& dir);

/// 17-significant-digit round-trippable rendering of a double.
std::string format_double(double v);

/// One key=value line per entry, in the given order.
struct ReportEntry {
    std::string key;
    std::string value;
};

/// report.txt (key=value; a single timestamp= line is the only
/// nondeterministic content) plus residuals_mode_<n>.csv histories.
void write_report(const DecomposeReport& report, const std::vector<ReportEntry>& config,
                  const std::filesystem::path& dir);

}  // namespace ontd
