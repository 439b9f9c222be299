#pragma once

#include <cstddef>

#include "brk/matrix.hpp"

namespace bnews::kernels {

// Output rows are distributed across OpenMP threads once the product is
// larger than this many multiply-adds. Each output entry is still reduced
// serially over k, so results do not depend on the thread count.
inline constexpr std::size_t kParallelThreshold = 1 << 16;

// OpenMP implementations backing the Matrix products.
void gemm(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);

// Number of threads OpenMP would use for a parallel region (1 without OpenMP).
int max_threads();

namespace serial {

// Triple-loop reference kernels, kept for equivalence tests and benchmarks.
void gemm(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);

}  // namespace serial

}  // namespace bnews::kernels
