#include "ave/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ave/errors.hpp"

namespace ave {

namespace {

void require(bool ok, const char* op, std::size_t expected, std::size_t got) {
    if (!ok) {
        throw DimensionMismatch(std::string(op) + ": expected length " + std::to_string(expected) +
                                ", got " + std::to_string(got));
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw Error(std::string(what) + ": non-finite entry");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatch("DenseMatrix: entries.size() != rows * cols");
    }
    for (double v : data_) require_finite(v, "DenseMatrix");
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.front().size();
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].size() != n) throw DimensionMismatch("DenseMatrix::from_rows: ragged rows");
        for (std::size_t j = 0; j < n; ++j) {
            require_finite(rows[i][j], "DenseMatrix");
            a(i, j) = rows[i][j];
        }
    }
    return a;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
    DenseMatrix a(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
    return a;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    validate();
}

void SparseMatrix::validate() const {
    if (row_offsets_.size() != rows_ + 1) throw Error("SparseMatrix: row_offsets length != rows + 1");
    if (row_offsets_.front() != 0 || row_offsets_.back() != values_.size() ||
        col_indices_.size() != values_.size()) {
        throw Error("SparseMatrix: inconsistent compressed arrays");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        if (row_offsets_[i] > row_offsets_[i + 1]) throw Error("SparseMatrix: row_offsets decreasing");
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            if (col_indices_[p] >= cols_) throw Error("SparseMatrix: column index out of range");
            if (p > row_offsets_[i] && col_indices_[p] <= col_indices_[p - 1]) {
                throw Error("SparseMatrix: column indices not strictly increasing in a row");
            }
            require_finite(values_[p], "SparseMatrix");
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols) throw Error("SparseMatrix: triplet index out of range");
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> offsets(rows + 1, 0);
    std::vector<std::size_t> cols_out;
    std::vector<double> vals;
    cols_out.reserve(triplets.size());
    vals.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size(); ++k) {
        const auto& t = triplets[k];
        if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
            vals.back() += t.value;
            continue;
        }
        cols_out.push_back(t.col);
        vals.push_back(t.value);
        ++offsets[t.row + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
    return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a, double drop_tol) {
    std::vector<Triplet> t;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (std::abs(a(i, j)) > drop_tol) t.push_back({i, j, a(i, j)});
    return from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<std::size_t> offsets(n + 1), cols(n);
    for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), Vector(n, 1.0));
}

SparseMatrix SparseMatrix::tridiagonal(std::size_t n, double sub, double diag, double super) {
    std::vector<Triplet> t;
    t.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) t.push_back({i, i - 1, sub});
        t.push_back({i, i, diag});
        if (i + 1 < n) t.push_back({i, i + 1, super});
    }
    return from_triplets(n, n, std::move(t));
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix a(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
            a(i, col_indices_[p]) = values_[p];
    return a;
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
            t.push_back({i, col_indices_[p], values_[p]});
    return t;
}

std::size_t SparseMatrix::lower_bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
            if (col_indices_[p] < i) bw = std::max(bw, i - col_indices_[p]);
    return bw;
}

std::size_t SparseMatrix::upper_bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
            if (col_indices_[p] > i) bw = std::max(bw, col_indices_[p] - i);
    return bw;
}

// ---------------------------------------------------------------------------
// Matrix

std::size_t Matrix::rows() const {
    return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

std::size_t Matrix::cols() const {
    return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

DenseMatrix Matrix::to_dense() const {
    if (const auto* d = dense()) return *d;
    return sparse()->to_dense();
}

double Matrix::max_abs() const {
    return std::visit([](const auto& m) { return m.max_abs(); }, storage_);
}

std::size_t Matrix::nnz() const {
    if (const auto* s = sparse()) return s->nnz();
    const auto& d = *dense();
    return static_cast<std::size_t>(
        std::count_if(d.entries().begin(), d.entries().end(), [](double v) { return v != 0.0; }));
}

Vector Matrix::diagonal() const {
    const std::size_t n = std::min(rows(), cols());
    Vector d(n, 0.0);
    if (const auto* m = dense()) {
        for (std::size_t i = 0; i < n; ++i) d[i] = (*m)(i, i);
        return d;
    }
    const auto& s = *sparse();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = s.row_offsets()[i]; p < s.row_offsets()[i + 1]; ++p)
            if (s.col_indices()[p] == i) d[i] = s.values()[p];
    return d;
}

Matrix Matrix::plus_diagonal(std::span<const double> d) const {
    if (d.size() != std::min(rows(), cols())) throw DimensionMismatch("plus_diagonal: length");
    if (const auto* m = dense()) {
        DenseMatrix out = *m;
        for (std::size_t i = 0; i < d.size(); ++i) out(i, i) += d[i];
        return out;
    }
    auto t = sparse()->triplets();
    for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return SparseMatrix::from_triplets(rows(), cols(), std::move(t));
}

Matrix Matrix::scaled(double c) const {
    if (const auto* m = dense()) {
        std::vector<double> e = m->entries();
        for (double& v : e) v *= c;
        return DenseMatrix(m->rows(), m->cols(), std::move(e));
    }
    const auto& s = *sparse();
    std::vector<double> v = s.values();
    for (double& x : v) x *= c;
    return SparseMatrix(s.rows(), s.cols(), s.row_offsets(), s.col_indices(), std::move(v));
}

// ---------------------------------------------------------------------------
// Products

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
    require(a.cols() == x.size(), "matvec", a.cols(), x.size());
    Vector y(a.rows(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        auto col = a.column(j);
        for (std::size_t i = 0; i < a.rows(); ++i) y[i] += col[i] * xj;
    }
    return y;
}

Vector matvec(const SparseMatrix& a, std::span<const double> x) {
    require(a.cols() == x.size(), "matvec", a.cols(), x.size());
    Vector y(a.rows(), 0.0);
    const auto& off = a.row_offsets();
    const auto& ci = a.col_indices();
    const auto& v = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t p = off[i]; p < off[i + 1]; ++p) s += v[p] * x[ci[p]];
        y[i] = s;
    }
    return y;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (const auto* d = a.dense()) return matvec(*d, x);
    return matvec(*a.sparse(), x);
}

Vector matvec_transpose(const DenseMatrix& a, std::span<const double> x) {
    require(a.rows() == x.size(), "matvec_transpose", a.rows(), x.size());
    Vector y(a.cols(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.column(j), x);
    return y;
}

Vector matvec_transpose(const SparseMatrix& a, std::span<const double> x) {
    require(a.rows() == x.size(), "matvec_transpose", a.rows(), x.size());
    Vector y(a.cols(), 0.0);
    const auto& off = a.row_offsets();
    const auto& ci = a.col_indices();
    const auto& v = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t p = off[i]; p < off[i + 1]; ++p) y[ci[p]] += v[p] * xi;
    }
    return y;
}

Vector matvec_transpose(const Matrix& a, std::span<const double> x) {
    if (const auto* d = a.dense()) return matvec_transpose(*d, x);
    return matvec_transpose(*a.sparse(), x);
}

// ---------------------------------------------------------------------------
// LinearOperator

LinearOperator::LinearOperator(std::size_t rows, std::size_t cols, Apply apply,
                               Apply apply_transpose)
    : rows_(rows), cols_(cols), apply_(std::move(apply)), apply_transpose_(std::move(apply_transpose)) {}

LinearOperator LinearOperator::of(const Matrix& a) {
    return LinearOperator(
        a.rows(), a.cols(), [&a](std::span<const double> x) { return matvec(a, x); },
        [&a](std::span<const double> y) { return matvec_transpose(a, y); });
}

Vector LinearOperator::apply(std::span<const double> x) const {
    require(x.size() == cols_, "LinearOperator::apply", cols_, x.size());
    return apply_(x);
}

Vector LinearOperator::apply_transpose(std::span<const double> y) const {
    require(y.size() == rows_, "LinearOperator::apply_transpose", rows_, y.size());
    return apply_transpose_(y);
}

// ---------------------------------------------------------------------------
// Vector helpers

double dot(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "dot", x.size(), y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) {
    // Scaled accumulation so huge diverging iterates do not overflow early.
    double scale = 0.0;
    double ssq = 1.0;
    for (double v : x) {
        if (v == 0.0) continue;
        const double a = std::abs(v);
        if (std::isnan(a) || std::isinf(a)) return a;
        if (scale < a) {
            ssq = 1.0 + ssq * (scale / a) * (scale / a);
            scale = a;
        } else {
            ssq += (a / scale) * (a / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    require(x.size() == y.size(), "axpy", y.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector add(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "add", x.size(), y.size());
    Vector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "subtract", x.size(), y.size());
    Vector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

Vector scale(double a, std::span<const double> x) {
    Vector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = a * x[i];
    return z;
}

Vector abs(std::span<const double> x) {
    Vector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::abs(x[i]);
    return z;
}

Vector sign_diag(std::span<const double> x) {
    Vector s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    return s;
}

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace ave
