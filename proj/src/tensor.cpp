#include "ontd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ontd {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols)
        throw std::invalid_argument("DenseMatrix: value count does not match rows*cols");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "matrix add");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.values()[i] = a.values()[i] + b.values()[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "matrix sub");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.values()[i] = a.values()[i] - b.values()[i];
    return c;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matrix multiply: inner dimensions disagree");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.values()[i] = s * a.values()[i];
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix c(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
    return c;
}

double trace(const DenseMatrix& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

double frob_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const DenseMatrix& a) {
    for (double v : a.values())
        if (!std::isfinite(v)) return false;
    return true;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const double v = a(ia, ja);
            if (v == 0.0) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    c(ia * b.rows() + ib, ja * b.cols() + jb) = v * b(ib, jb);
        }
    return c;
}

namespace {

std::size_t checked_product(const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw std::invalid_argument("DenseTensor: order must be >= 1");
    std::size_t p = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("DenseTensor: every dimension must be >= 1");
        if (d != 0 && p > std::numeric_limits<std::size_t>::max() / d)
            throw std::invalid_argument("DenseTensor: dimension product overflows");
        p *= d;
    }
    return p;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), values_(checked_product(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
    if (values_.size() != checked_product(dims_))
        throw std::invalid_argument("DenseTensor: value count does not match dimension product");
}

// Flat index in row-major storage decomposes as (p * I_n + m) * S + s where
// p runs over the modes before n, m over mode n, and s over the modes after
// n. The cyclic column convention maps this element to column s * P + p.
DenseMatrix unfold(const DenseTensor& t, std::size_t mode) {
    const std::size_t d = t.order();
    if (mode >= d) throw std::invalid_argument("unfold: mode out of range");
    std::size_t prefix = 1, suffix = 1;
    for (std::size_t k = 0; k < mode; ++k) prefix *= t.dim(k);
    for (std::size_t k = mode + 1; k < d; ++k) suffix *= t.dim(k);
    const std::size_t in = t.dim(mode);

    DenseMatrix out(in, prefix * suffix);
    std::size_t flat = 0;
    for (std::size_t p = 0; p < prefix; ++p)
        for (std::size_t m = 0; m < in; ++m)
            for (std::size_t s = 0; s < suffix; ++s, ++flat)
                out(m, s * prefix + p) = t[flat];
    return out;
}

DenseTensor fold(const DenseMatrix& m, std::size_t mode, const std::vector<std::size_t>& dims) {
    const std::size_t d = dims.size();
    if (mode >= d) throw std::invalid_argument("fold: mode out of range");
    std::size_t prefix = 1, suffix = 1;
    for (std::size_t k = 0; k < mode; ++k) prefix *= dims[k];
    for (std::size_t k = mode + 1; k < d; ++k) suffix *= dims[k];
    const std::size_t in = dims[mode];
    if (m.rows() != in || m.cols() != prefix * suffix)
        throw std::invalid_argument("fold: matrix shape does not match target dims");

    std::vector<double> values(prefix * in * suffix);
    std::size_t flat = 0;
    for (std::size_t p = 0; p < prefix; ++p)
        for (std::size_t mm = 0; mm < in; ++mm)
            for (std::size_t s = 0; s < suffix; ++s, ++flat)
                values[flat] = m(mm, s * prefix + p);
    return DenseTensor(dims, std::move(values));
}

DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& m, std::size_t mode) {
    const std::size_t d = t.order();
    if (mode >= d) throw std::invalid_argument("mode_product: mode out of range");
    if (m.cols() != t.dim(mode))
        throw std::invalid_argument("mode_product: matrix columns do not match tensor mode");

    std::size_t prefix = 1, suffix = 1;
    for (std::size_t k = 0; k < mode; ++k) prefix *= t.dim(k);
    for (std::size_t k = mode + 1; k < d; ++k) suffix *= t.dim(k);
    const std::size_t in = t.dim(mode);
    const std::size_t out_n = m.rows();

    std::vector<std::size_t> out_dims = t.dims();
    out_dims[mode] = out_n;
    std::vector<double> out(prefix * out_n * suffix, 0.0);

    const std::span<const double> tv = t.values();
    for (std::size_t p = 0; p < prefix; ++p) {
        const std::size_t in_base = p * in * suffix;
        const std::size_t out_base = p * out_n * suffix;
        for (std::size_t r = 0; r < out_n; ++r) {
            double* orow = out.data() + out_base + r * suffix;
            for (std::size_t k = 0; k < in; ++k) {
                const double w = m(r, k);
                if (w == 0.0) continue;
                const double* irow = tv.data() + in_base + k * suffix;
                for (std::size_t s = 0; s < suffix; ++s) orow[s] += w * irow[s];
            }
        }
    }
    return DenseTensor(std::move(out_dims), std::move(out));
}

double frob_norm(const DenseTensor& t) {
    double s = 0.0;
    for (double v : t.values()) s += v * v;
    return std::sqrt(s);
}

double min_value(const DenseTensor& t) {
    double m = t.values()[0];
    for (double v : t.values()) m = std::min(m, v);
    return m;
}

}  // namespace ontd
