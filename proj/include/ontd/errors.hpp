#pragma once

#include <stdexcept>
#include <string>

namespace ontd {

/// File or format problem: bad magic, ragged CSV, count mismatch,
/// non-finite values in an input file.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: indefinite matrix in a Cholesky solve, eigensolver
/// breakdown, recovery from a degenerate projector.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ontd
