#include "ontd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ontd/errors.hpp"

namespace ontd {

namespace {

double off_diag_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

EigenPair sym_eig(const DenseMatrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
    if (!all_finite(s)) throw NumericalError("sym_eig: non-finite entries");
    const std::size_t n = s.rows();
    const double scale = std::max(1.0, frob_norm(s));
    {
        double asym = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = s(i, j) - s(j, i);
                asym += 2.0 * d * d;
            }
        if (std::sqrt(asym) > 1e-8 * scale)
            throw std::invalid_argument("sym_eig: input is not symmetric");
    }

    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));
    DenseMatrix v = DenseMatrix::identity(n);

    const double stop = 1e-12 * scale;
    for (int sweep = 0; sweep < 100 && off_diag_norm(a) > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenPair out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.values[k] = a(src, src);
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::abs(v(i, src));
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        const double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
    }
    return out;
}

CholeskyFactor::CholeskyFactor(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("CholeskyFactor: matrix must be square");
    if (!all_finite(a)) throw NumericalError("CholeskyFactor: non-finite entries");
    const std::size_t n = a.rows();
    lower_ = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lower_(j, k) * lower_(j, k);
        if (!(d > 0.0))
            throw NumericalError("CholeskyFactor: non-positive pivot, matrix is not positive definite");
        const double ljj = std::sqrt(d);
        lower_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.5 * (a(i, j) + a(j, i));
            for (std::size_t k = 0; k < j; ++k) s -= lower_(i, k) * lower_(j, k);
            lower_(i, j) = s / ljj;
        }
    }
}

DenseMatrix CholeskyFactor::solve(const DenseMatrix& b) const {
    const std::size_t n = dim();
    if (b.rows() != n) throw std::invalid_argument("CholeskyFactor::solve: shape mismatch");
    DenseMatrix x = b;
    // forward substitution L y = b, per column
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * x(k, c);
            x(i, c) = s / lower_(i, i);
        }
    }
    // back substitution L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            double s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * x(k, c);
            x(ii, c) = s / lower_(ii, ii);
        }
    }
    return x;
}

DenseMatrix CholeskyFactor::solve_right(const DenseMatrix& b) const {
    return transpose(solve(transpose(b)));
}

DenseMatrix spd_solve(const DenseMatrix& a, const DenseMatrix& b) {
    return CholeskyFactor(a).solve(b);
}

}  // namespace ontd
