#include "brk/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brk/kernels.hpp"

namespace bnews {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Matrix: data length " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<std::vector<double>> tmp;
    for (const auto& r : rows) tmp.emplace_back(r);
    return from_rows(tmp);
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw std::invalid_argument("Matrix::from_rows: ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return {rows.size(), cols, std::move(data)};
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
    return {1, values.size(), std::vector<double>(values.begin(), values.end())};
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& x : data_) x *= s;
    return *this;
}

std::string shape_string(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_string(a) +
                                    " vs " + shape_string(b));
    }
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    auto od = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < od.size(); ++i) od[i] *= bd[i];
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: " + shape_string(a) + " * " + shape_string(b));
    Matrix out;
    kernels::gemm(a, b, out);
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("matmul_tn: " + shape_string(a) + "^T * " + shape_string(b));
    Matrix out;
    kernels::gemm_tn(a, b, out);
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_nt: " + shape_string(a) + " * " + shape_string(b) +
                                    "^T");
    Matrix out;
    kernels::gemm_nt(a, b, out);
    return out;
}

Matrix tanh(const Matrix& a) {
    Matrix out = a;
    for (double& x : out.data()) x = std::tanh(x);
    return out;
}

Matrix relu(const Matrix& a) {
    Matrix out = a;
    for (double& x : out.data()) x = x > 0.0 ? x : 0.0;
    return out;
}

Matrix add_row_vector(Matrix a, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols())
        throw std::invalid_argument("add_row_vector: bias " + shape_string(bias) + " for " +
                                    shape_string(a));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += bias(0, j);
    return a;
}

Matrix column_sums(const Matrix& a) {
    Matrix out(1, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += a(i, j);
    return out;
}

Matrix column_means(const Matrix& a) {
    if (a.rows() == 0) throw std::invalid_argument("column_means: empty matrix");
    Matrix out = column_sums(a);
    out *= 1.0 / static_cast<double>(a.rows());
    return out;
}

Matrix hconcat(const Matrix& left, const Matrix& right) {
    if (left.rows() != right.rows())
        throw std::invalid_argument("hconcat: " + shape_string(left) + " | " +
                                    shape_string(right));
    Matrix out(left.rows(), left.cols() + right.cols());
    for (std::size_t i = 0; i < left.rows(); ++i) {
        std::copy(left.row(i).begin(), left.row(i).end(), out.row(i).begin());
        std::copy(right.row(i).begin(), right.row(i).end(),
                  out.row(i).begin() + static_cast<std::ptrdiff_t>(left.cols()));
    }
    return out;
}

Matrix vconcat(const Matrix& top, const Matrix& bottom) {
    if (top.empty()) return bottom;
    if (bottom.empty()) return top;
    if (top.cols() != bottom.cols())
        throw std::invalid_argument("vconcat: " + shape_string(top) + " / " +
                                    shape_string(bottom));
    std::vector<double> data(top.storage());
    data.insert(data.end(), bottom.storage().begin(), bottom.storage().end());
    return {top.rows() + bottom.rows(), top.cols(), std::move(data)};
}

Matrix column_slice(const Matrix& a, std::size_t begin, std::size_t count) {
    if (begin + count > a.cols()) throw std::invalid_argument("column_slice: out of range");
    Matrix out(a.rows(), count);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = a(i, begin + j);
    return out;
}

double sum(const Matrix& a) {
    double acc = 0.0;
    for (double x : a.data()) acc += x;
    return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

Matrix pairwise_cosine(const Matrix& a) {
    Matrix out(a.rows(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.rows(); ++j) out(i, j) = cosine(a.row(i), a.row(j));
    return out;
}

}  // namespace bnews
