#include <gtest/gtest.h>

#include <random>

#include "ave/errors.hpp"
#include "ave/lu.hpp"

using namespace ave;

namespace {

double max_abs_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

SparseMatrix random_banded(std::size_t n, std::size_t kl, std::size_t ku, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= kl ? i - kl : 0;
        const std::size_t hi = std::min(n - 1, i + ku);
        // A diagonal shift keeps the kl = 0 case (triangular) well conditioned.
        for (std::size_t j = lo; j <= hi; ++j) t.push_back({i, j, u(gen) + (i == j ? 1.5 : 0.0)});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

TEST(DenseLu, SolvesSmallSystemNeedingPivoting) {
    // Leading zero forces a row swap.
    DenseMatrix a = DenseMatrix::from_rows({{0, 2, 1}, {1, 1, 0}, {2, 0, 3}});
    Vector x{1, -2, 3};
    Vector b = matvec(a, x);
    LuFactors f = lu_factor(a);
    EXPECT_FALSE(f.banded());
    EXPECT_LT(max_abs_diff(f.solve(b), x), 1e-14);
    EXPECT_LT(max_abs_diff(f.solve_transpose(matvec_transpose(a, x)), x), 1e-14);
    EXPECT_LT(max_abs_diff(lu_solve(f, b), x), 1e-14);
}

TEST(DenseLu, SingularThrows) {
    EXPECT_THROW(lu_factor(DenseMatrix::from_rows({{1, 2}, {2, 4}})), SingularMatrix);
    EXPECT_THROW(lu_factor(DenseMatrix(3, 3, 0.0)), SingularMatrix);
    EXPECT_THROW(lu_factor(DenseMatrix(2, 3)), DimensionMismatch);
}

TEST(DenseLu, RandomSystemsResidual) {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {1u, 5u, 40u, 120u}) {
        DenseMatrix a(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) a(i, j) = u(gen) + (i == j ? 3.0 : 0.0);
        Vector x(n);
        for (double& v : x) v = u(gen);
        const Vector y = lu_factor(a).solve(matvec(a, x));
        EXPECT_LT(max_abs_diff(y, x), 1e-11) << "n = " << n;
    }
}

TEST(BandedLu, MatchesDenseFactorization) {
    for (auto [kl, ku] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 1}, {0, 3}, {3, 2}}) {
        SparseMatrix s = random_banded(60, kl, ku, 7 + kl * 10 + ku);
        Vector x(60);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(static_cast<double>(i));
        const Vector b = matvec(s, x);
        LuFactors band = lu_factor_banded(s);
        LuFactors dense = lu_factor(s.to_dense());
        EXPECT_TRUE(band.banded());
        EXPECT_LT(max_abs_diff(band.solve(b), dense.solve(b)), 1e-9) << kl << "," << ku;
        const Vector bt = matvec_transpose(s, x);
        EXPECT_LT(max_abs_diff(band.solve_transpose(bt), x), 1e-8) << kl << "," << ku;
    }
}

TEST(BandedLu, SparseDispatchUsesBandForNarrowMatrices) {
    EXPECT_TRUE(lu_factor(SparseMatrix::tridiagonal(64, -1, 8, -1)).banded());
    EXPECT_FALSE(lu_factor(SparseMatrix::tridiagonal(8, -1, 8, -1)).banded());
    EXPECT_TRUE(lu_factor(Matrix(SparseMatrix::tridiagonal(4000, -1, 8, -1))).banded());
}

TEST(BandedLu, LargeTridiagonalSolve) {
    const std::size_t n = 4000;
    SparseMatrix t = SparseMatrix::tridiagonal(n, -1, 8, -1);
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = i % 2 ? 1.0 : -1.0;
    const Vector y = lu_factor(t).solve(matvec(t, x));
    EXPECT_LT(max_abs_diff(y, x), 1e-13);
}

TEST(BandedLu, SingularBandThrows) {
    SparseMatrix z = SparseMatrix::from_triplets(20, 20, {{0, 0, 1.0}, {19, 19, 1.0}});
    EXPECT_THROW(lu_factor_banded(z), SingularMatrix);
}
