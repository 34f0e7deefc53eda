#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ave/linalg.hpp"

namespace ave {

/// Pivot magnitudes below this fraction of max|a_ij| are treated as singular.
inline constexpr double kPivotRelativeTolerance = 1e-14;

/// LU factors with partial pivoting.
///
/// Dense inputs are factored as PA = LU with L and U sharing one column-major
/// array and `permutation()[i]` naming the original row placed at position i.
/// Sparse inputs with a narrow band are factored in band storage (the LAPACK
/// gbtrf scheme: row interchanges recorded per elimination step, U widened to
/// kl + ku superdiagonals) so banded problems stay O(n) per solve.
class LuFactors {
public:
    std::size_t size() const noexcept { return n_; }
    bool banded() const noexcept { return banded_; }

    /// Solves A y = b.
    Vector solve(std::span<const double> b) const;
    /// Solves A^T y = b.
    Vector solve_transpose(std::span<const double> b) const;

    /// Row permutation (dense factors) or the per-step pivot rows (banded).
    const std::vector<std::size_t>& permutation() const noexcept { return perm_; }
    /// Combined L\U storage for dense factors; empty for banded factors.
    const DenseMatrix& combined() const noexcept { return lu_; }

private:
    friend LuFactors lu_factor(const DenseMatrix& a);
    friend LuFactors lu_factor_banded(const SparseMatrix& a);

    std::size_t n_ = 0;
    bool banded_ = false;
    std::vector<std::size_t> perm_;
    DenseMatrix lu_;

    // Band storage: row-major, width 2*kl + ku + 1, entry (i, j) at
    // i * width + (j - i + kl). Multipliers live in mult_ (kl per step).
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::vector<double> band_;
    std::vector<double> mult_;
};

/// Throws SingularMatrix when a pivot falls below kPivotRelativeTolerance * max|a_ij|.
LuFactors lu_factor(const DenseMatrix& a);
LuFactors lu_factor_banded(const SparseMatrix& a);
/// Band factorization when the band is narrow relative to n, dense otherwise.
LuFactors lu_factor(const SparseMatrix& a);
LuFactors lu_factor(const Matrix& a);

Vector lu_solve(const LuFactors& f, std::span<const double> b);

}  // namespace ave
