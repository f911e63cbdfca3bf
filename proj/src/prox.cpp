#include "ontd/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ontd/linalg.hpp"

namespace ontd {

DenseMatrix shrinkage(const DenseMatrix& x, double tau) {
    if (tau < 0.0) throw std::invalid_argument("shrinkage: tau must be nonnegative");
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x.values()[i];
        const double m = std::abs(v) - tau;
        out.values()[i] = m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
    }
    return out;
}

DenseMatrix project_nonneg(const DenseMatrix& x) {
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i)
        out.values()[i] = std::max(x.values()[i], 0.0);
    return out;
}

namespace {

DenseMatrix assemble_clipped(const EigenPair& eig, double scale) {
    const std::size_t n = eig.vectors.rows();
    DenseMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = scale * std::clamp(eig.values[k], 0.0, 1.0);
        if (lam == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = eig.vectors(i, k);
            if (vik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += lam * vik * eig.vectors(j, k);
        }
    }
    return out;
}

}  // namespace

DenseMatrix project_sym_box_psd(const DenseMatrix& b) {
    if (b.rows() != b.cols())
        throw std::invalid_argument("project_sym_box_psd: matrix must be square");
    const std::size_t n = b.rows();
    DenseMatrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (b(i, j) + b(j, i));
    return assemble_clipped(sym_eig(sym), 1.0);
}

DenseMatrix project_sym_box_psd_literal(const DenseMatrix& b) {
    if (b.rows() != b.cols())
        throw std::invalid_argument("project_sym_box_psd_literal: matrix must be square");
    return assemble_clipped(sym_eig(b + transpose(b)), 0.5);
}

DenseMatrix trace_shift(const DenseMatrix& b, double target_trace) {
    if (b.rows() != b.cols()) throw std::invalid_argument("trace_shift: matrix must be square");
    const double shift = (trace(b) - target_trace) / static_cast<double>(b.rows());
    DenseMatrix out = b;
    for (std::size_t i = 0; i < b.rows(); ++i) out(i, i) -= shift;
    return out;
}

}  // namespace ontd
