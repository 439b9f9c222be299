#include "brk/kernels.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bnews::kernels {

namespace {

void check_out(Matrix& out, std::size_t rows, std::size_t cols) {
    if (out.rows() != rows || out.cols() != cols) {
        out = Matrix(rows, cols);
    } else {
        for (double& x : out.data()) x = 0.0;
    }
}

std::ptrdiff_t as_index(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.rows()) throw std::invalid_argument("gemm: inner dimension mismatch");
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    check_out(out, n, m);
    const bool par = n * k * m >= kParallelThreshold;
    // i-k-j order: every out(i, j) still accumulates over k in ascending order.
#pragma omp parallel for if (par) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < as_index(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* orow = out.row(i).data();
        const double* arow = a.row(i).data();
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b.row(p).data();
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.rows() != b.rows()) throw std::invalid_argument("gemm_tn: inner dimension mismatch");
    const std::size_t n = a.cols(), k = a.rows(), m = b.cols();
    check_out(out, n, m);
    const bool par = n * k * m >= kParallelThreshold;
#pragma omp parallel for if (par) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < as_index(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* orow = out.row(i).data();
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a(p, i);
            const double* brow = b.row(p).data();
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.cols()) throw std::invalid_argument("gemm_nt: inner dimension mismatch");
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    check_out(out, n, m);
    const bool par = n * k * m >= kParallelThreshold;
#pragma omp parallel for if (par) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < as_index(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* arow = a.row(i).data();
        double* orow = out.row(i).data();
        for (std::size_t j = 0; j < m; ++j) {
            const double* brow = b.row(j).data();
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            orow[j] = acc;
        }
    }
}

namespace serial {

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.rows()) throw std::invalid_argument("gemm: inner dimension mismatch");
    out = Matrix(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) acc += a(i, p) * b(p, j);
            out(i, j) = acc;
        }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.rows() != b.rows()) throw std::invalid_argument("gemm_tn: inner dimension mismatch");
    out = Matrix(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.rows(); ++p) acc += a(p, i) * b(p, j);
            out(i, j) = acc;
        }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.cols()) throw std::invalid_argument("gemm_nt: inner dimension mismatch");
    out = Matrix(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) acc += a(i, p) * b(j, p);
            out(i, j) = acc;
        }
}

}  // namespace serial

}  // namespace bnews::kernels
