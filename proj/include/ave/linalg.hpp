#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace ave {

using Vector = std::vector<double>;

/// Column-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Builds from column-major entries; entries.size() must equal rows * cols.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    /// Row-major nested initializer, convenient for small literal matrices.
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    std::span<const double> column(std::size_t j) const {
        return {data_.data() + j * rows_, rows_};
    }
    std::span<double> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

    const std::vector<double>& entries() const noexcept { return data_; }

    double max_abs() const;
    DenseMatrix transpose() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// One (row, col, value) entry used when assembling a sparse matrix.
struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix with strictly increasing column indices per row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                 std::vector<std::size_t> col_indices, std::vector<double> values);

    /// Duplicate entries are summed; explicit zeros are kept.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);
    static SparseMatrix from_dense(const DenseMatrix& a, double drop_tol = 0.0);
    static SparseMatrix identity(std::size_t n);
    static SparseMatrix tridiagonal(std::size_t n, double sub, double diag, double super);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
    const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double max_abs() const;
    DenseMatrix to_dense() const;
    std::vector<Triplet> triplets() const;
    /// Largest |i - j| over stored entries below / above the diagonal.
    std::size_t lower_bandwidth() const;
    std::size_t upper_bandwidth() const;

private:
    void validate() const;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// Either storage layout behind one value type.
class Matrix {
public:
    Matrix() = default;
    Matrix(DenseMatrix m) : storage_(std::move(m)) {}
    Matrix(SparseMatrix m) : storage_(std::move(m)) {}

    std::size_t rows() const;
    std::size_t cols() const;
    bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(storage_); }

    const DenseMatrix* dense() const noexcept { return std::get_if<DenseMatrix>(&storage_); }
    const SparseMatrix* sparse() const noexcept { return std::get_if<SparseMatrix>(&storage_); }

    DenseMatrix to_dense() const;
    double max_abs() const;
    std::size_t nnz() const;
    /// Copy of the diagonal; missing entries are zero.
    Vector diagonal() const;
    /// A + diag(d), preserving the storage layout.
    Matrix plus_diagonal(std::span<const double> d) const;
    /// c * A.
    Matrix scaled(double c) const;

private:
    std::variant<DenseMatrix, SparseMatrix> storage_;
};

// Products. All throw DimensionMismatch on nonconforming sizes.
Vector matvec(const DenseMatrix& a, std::span<const double> x);
Vector matvec(const SparseMatrix& a, std::span<const double> x);
Vector matvec(const Matrix& a, std::span<const double> x);
Vector matvec_transpose(const DenseMatrix& a, std::span<const double> x);
Vector matvec_transpose(const SparseMatrix& a, std::span<const double> x);
Vector matvec_transpose(const Matrix& a, std::span<const double> x);

/// Matrix-free view used by LSQR and the power iterations.
class LinearOperator {
public:
    using Apply = std::function<Vector(std::span<const double>)>;

    LinearOperator(std::size_t rows, std::size_t cols, Apply apply, Apply apply_transpose);
    /// View of a matrix; the matrix must outlive the operator.
    static LinearOperator of(const Matrix& a);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Vector apply(std::span<const double> x) const;
    Vector apply_transpose(std::span<const double> y) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    Apply apply_;
    Apply apply_transpose_;
};

// Vector helpers.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y <- y + a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
Vector add(std::span<const double> x, std::span<const double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);
Vector scale(double a, std::span<const double> x);
Vector abs(std::span<const double> x);
/// Componentwise sign with sign(0) = 0: the diagonal of D(x).
Vector sign_diag(std::span<const double> x);
bool all_finite(std::span<const double> x);

}  // namespace ave
