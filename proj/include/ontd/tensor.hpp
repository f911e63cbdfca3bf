#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ontd {

/// Dense row-major matrix of 64-bit reals.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

DenseMatrix transpose(const DenseMatrix& a);
double trace(const DenseMatrix& a);
double frob_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
bool all_finite(const DenseMatrix& a);

/// Kronecker product, row multi-index (A-row slow, B-row fast).
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// Dense d-way tensor, row-major flat storage with the LAST index varying
/// fastest. Immutable after construction; all operations return new values.
class DenseTensor {
public:
    explicit DenseTensor(std::vector<std::size_t> dims);
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> values);

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t n) const { return dims_[n]; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t flat) const { return values_[flat]; }
    std::span<const double> values() const { return values_; }

private:
    std::vector<std::size_t> dims_;
    std::vector<double> values_;
};

/// Mode-n unfolding (0-based mode). Rows are the mode-n fibers; the column
/// multi-index runs cyclically over modes (n+1, ..., d-1, 0, ..., n-1) with
/// the last of that list varying fastest, so that
///   unfold(S x_0 U0 ... x_{d-1} U_{d-1}, n)
///     = U_n * unfold(S, n) * (U_{n+1} (x) ... (x) U_{n-1})^T
/// holds exactly.
DenseMatrix unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of unfold under the same index convention.
DenseTensor fold(const DenseMatrix& m, std::size_t mode, const std::vector<std::size_t>& dims);

/// Mode-n product t x_n m; output dims equal t's with entry n replaced by
/// m.rows().
DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& m, std::size_t mode);

double frob_norm(const DenseTensor& t);
double min_value(const DenseTensor& t);

}  // namespace ontd
