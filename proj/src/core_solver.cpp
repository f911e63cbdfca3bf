#include "ontd/core_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ontd {

std::vector<std::size_t> OntdModel::output_dims() const {
    std::vector<std::size_t> dims(order());
    for (std::size_t n = 0; n < order(); ++n)
        dims[n] = factors[n] ? factors[n]->rows() : core.dim(n);
    return dims;
}

CoreSolveResult solve_core(const DenseTensor& a,
                           const std::vector<std::optional<FactorMatrix>>& factors) {
    if (factors.size() != a.order())
        throw std::invalid_argument("solve_core: one factor entry per mode required");

    CoreSolveResult out{a, 0, 0.0};
    for (std::size_t n = 0; n < factors.size(); ++n) {
        if (!factors[n]) continue;
        const FactorMatrix& u = *factors[n];
        if (u.rows() != a.dim(n))
            throw std::invalid_argument("solve_core: factor rows do not match tensor mode");
        const DenseMatrix gram = transpose(u.matrix()) * u.matrix();
        double defect = 0.0;
        for (std::size_t i = 0; i < gram.rows(); ++i)
            for (std::size_t j = 0; j < gram.cols(); ++j)
                defect = std::max(defect, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
        out.max_orthonormality_defect = std::max(out.max_orthonormality_defect, defect);
        out.core = mode_product(out.core, transpose(u.matrix()), n);
    }

    std::vector<double> values(out.core.values().begin(), out.core.values().end());
    for (double& v : values) {
        if (v < 0.0) {
            v = 0.0;
            ++out.clamped_negatives;
        }
    }
    out.core = DenseTensor(out.core.dims(), std::move(values));
    return out;
}

DenseTensor reconstruct(const OntdModel& model) {
    if (model.factors.size() != model.core.order())
        throw std::invalid_argument("reconstruct: one factor entry per mode required");
    DenseTensor t = model.core;
    for (std::size_t n = 0; n < model.factors.size(); ++n) {
        if (!model.factors[n]) continue;
        if (model.factors[n]->cols() != model.core.dim(n))
            throw std::invalid_argument("reconstruct: factor cols do not match core mode");
        t = mode_product(t, model.factors[n]->matrix(), n);
    }
    return t;
}

std::vector<std::pair<double, double>> rowwise_norm_check(const DenseTensor& a,
                                                          const OntdModel& model,
                                                          std::size_t mode) {
    if (mode >= a.order()) throw std::invalid_argument("rowwise_norm_check: mode out of range");
    const DenseMatrix a_unf = unfold(a, mode);
    const DenseMatrix s_unf = unfold(model.core, mode);

    std::vector<std::vector<std::size_t>> supports;
    if (model.factors[mode]) {
        supports = model.factors[mode]->column_supports();
    } else {
        supports.resize(a.dim(mode));
        for (std::size_t j = 0; j < supports.size(); ++j) supports[j] = {j};
    }

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(supports.size());
    for (std::size_t j = 0; j < supports.size(); ++j) {
        double s_sq = 0.0;
        for (std::size_t c = 0; c < s_unf.cols(); ++c) s_sq += s_unf(j, c) * s_unf(j, c);
        double a_sq = 0.0;
        for (std::size_t row : supports[j])
            for (std::size_t c = 0; c < a_unf.cols(); ++c) a_sq += a_unf(row, c) * a_unf(row, c);
        pairs.emplace_back(std::sqrt(s_sq), std::sqrt(a_sq));
    }
    return pairs;
}

}  // namespace ontd
