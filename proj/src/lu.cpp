#include "ave/lu.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ave/errors.hpp"

namespace ave {

namespace {

[[noreturn]] void throw_singular(std::size_t k, double pivot, double threshold) {
    throw SingularMatrix("lu_factor: pivot " + std::to_string(pivot) + " at step " +
                         std::to_string(k) + " below threshold " + std::to_string(threshold));
}

}  // namespace

LuFactors lu_factor(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("lu_factor: matrix is not square");
    const std::size_t n = a.rows();
    LuFactors f;
    f.n_ = n;
    f.lu_ = a;
    f.perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.perm_[i] = i;

    const double threshold = kPivotRelativeTolerance * a.max_abs();
    DenseMatrix& lu = f.lu_;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                p = i;
            }
        }
        if (best <= threshold || best == 0.0) throw_singular(k, best, threshold);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            std::swap(f.perm_[k], f.perm_[p]);
        }
        const double inv_pivot = 1.0 / lu(k, k);
        auto colk = lu.column(k);
        for (std::size_t i = k + 1; i < n; ++i) colk[i] *= inv_pivot;
        for (std::size_t j = k + 1; j < n; ++j) {
            const double ukj = lu(k, j);
            if (ukj == 0.0) continue;
            auto colj = lu.column(j);
            for (std::size_t i = k + 1; i < n; ++i) colj[i] -= colk[i] * ukj;
        }
    }
    return f;
}

LuFactors lu_factor_banded(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("lu_factor: matrix is not square");
    const std::size_t n = a.rows();
    LuFactors f;
    f.n_ = n;
    f.banded_ = true;
    f.kl_ = a.lower_bandwidth();
    f.ku_ = a.upper_bandwidth();
    const std::size_t kl = f.kl_;
    const std::size_t width = 2 * kl + f.ku_ + 1;
    const std::size_t reach = kl + f.ku_;
    f.band_.assign(n * width, 0.0);
    f.mult_.assign(n * kl, 0.0);
    f.perm_.resize(n);

    auto at = [&](std::size_t i, std::size_t j) -> double& {
        return f.band_[i * width + (j + kl - i)];
    };
    const auto& off = a.row_offsets();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = off[i]; p < off[i + 1]; ++p) at(i, a.col_indices()[p]) = a.values()[p];

    const double threshold = kPivotRelativeTolerance * a.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t last_row = std::min(n - 1, k + kl);
        const std::size_t last_col = std::min(n - 1, k + reach);
        std::size_t p = k;
        double best = std::abs(at(k, k));
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            if (std::abs(at(i, k)) > best) {
                best = std::abs(at(i, k));
                p = i;
            }
        }
        if (best <= threshold || best == 0.0) throw_singular(k, best, threshold);
        f.perm_[k] = p;
        if (p != k)
            for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
        const double pivot = at(k, k);
        for (std::size_t i = k + 1; i <= last_row; ++i) {
            const double m = at(i, k) / pivot;
            f.mult_[k * kl + (i - k - 1)] = m;
            at(i, k) = 0.0;
            if (m == 0.0) continue;
            for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= m * at(k, j);
        }
    }
    return f;
}

LuFactors lu_factor(const SparseMatrix& a) {
    const std::size_t n = a.rows();
    const std::size_t width = 2 * a.lower_bandwidth() + a.upper_bandwidth() + 1;
    if (a.rows() == a.cols() && n >= 16 && 4 * width <= n) return lu_factor_banded(a);
    return lu_factor(a.to_dense());
}

LuFactors lu_factor(const Matrix& a) {
    if (const auto* d = a.dense()) return lu_factor(*d);
    return lu_factor(*a.sparse());
}

Vector LuFactors::solve(std::span<const double> b) const {
    if (b.size() != n_) throw DimensionMismatch("lu_solve: right-hand side length mismatch");
    const std::size_t n = n_;
    if (!banded_) {
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
        for (std::size_t j = 0; j < n; ++j) {
            const double yj = y[j];
            if (yj == 0.0) continue;
            auto col = lu_.column(j);
            for (std::size_t i = j + 1; i < n; ++i) y[i] -= col[i] * yj;
        }
        for (std::size_t j = n; j-- > 0;) {
            auto col = lu_.column(j);
            y[j] /= col[j];
            const double yj = y[j];
            if (yj == 0.0) continue;
            for (std::size_t i = 0; i < j; ++i) y[i] -= col[i] * yj;
        }
        return y;
    }

    const std::size_t kl = kl_;
    const std::size_t width = 2 * kl + ku_ + 1;
    const std::size_t reach = kl + ku_;
    auto at = [&](std::size_t i, std::size_t j) { return band_[i * width + (j + kl - i)]; };
    Vector y(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        std::swap(y[k], y[perm_[k]]);
        const std::size_t last_row = std::min(n - 1, k + kl);
        for (std::size_t i = k + 1; i <= last_row; ++i) y[i] -= mult_[k * kl + (i - k - 1)] * y[k];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        const std::size_t last_col = std::min(n - 1, i + reach);
        for (std::size_t j = i + 1; j <= last_col; ++j) s -= at(i, j) * y[j];
        y[i] = s / at(i, i);
    }
    return y;
}

Vector LuFactors::solve_transpose(std::span<const double> b) const {
    if (b.size() != n_) throw DimensionMismatch("lu_solve: right-hand side length mismatch");
    const std::size_t n = n_;
    if (!banded_) {
        // A^T = U^T L^T P.
        Vector w(b.begin(), b.end());
        for (std::size_t j = 0; j < n; ++j) {
            auto col = lu_.column(j);
            double s = w[j];
            for (std::size_t i = 0; i < j; ++i) s -= col[i] * w[i];
            w[j] = s / col[j];
        }
        for (std::size_t j = n; j-- > 0;) {
            auto col = lu_.column(j);
            double s = w[j];
            for (std::size_t i = j + 1; i < n; ++i) s -= col[i] * w[i];
            w[j] = s;
        }
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) y[perm_[i]] = w[i];
        return y;
    }

    const std::size_t kl = kl_;
    const std::size_t width = 2 * kl + ku_ + 1;
    const std::size_t reach = kl + ku_;
    auto at = [&](std::size_t i, std::size_t j) { return band_[i * width + (j + kl - i)]; };
    Vector z(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = z[i];
        const std::size_t first = i > reach ? i - reach : 0;
        for (std::size_t j = first; j < i; ++j) s -= at(j, i) * z[j];
        z[i] = s / at(i, i);
    }
    for (std::size_t k = n; k-- > 0;) {
        const std::size_t last_row = std::min(n - 1, k + kl);
        double s = z[k];
        for (std::size_t i = k + 1; i <= last_row; ++i) s -= mult_[k * kl + (i - k - 1)] * z[i];
        z[k] = s;
        std::swap(z[k], z[perm_[k]]);
    }
    return z;
}

Vector lu_solve(const LuFactors& f, std::span<const double> b) { return f.solve(b); }

}  // namespace ave
