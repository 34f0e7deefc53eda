#pragma once

#include <cstddef>

#include "ave/linalg.hpp"
#include "ave/lu.hpp"

namespace ave {

struct SpectralOptions {
    double tol = 1e-10;
    std::size_t max_iter = 200000;
};

/// Deterministic start vector: all ones plus a small hashed perturbation,
/// normalized. Avoids starts orthogonal to symmetric/alternating modes.
Vector power_start_vector(std::size_t n);

/// Largest singular value by power iteration on A^T A. Stops when the
/// Rayleigh quotient changes by at most tol (relative) between sweeps;
/// throws NoConvergence after max_iter sweeps.
double matrix_norm2_estimate(const LinearOperator& a, SpectralOptions opts = {});
double matrix_norm2_estimate(const Matrix& a, SpectralOptions opts = {});

/// Smallest singular value by inverse power iteration on A^T A using the
/// LU factors of A (solves with A and A^T).
double sigma_min_estimate(const LuFactors& factors, SpectralOptions opts = {});
/// Factors A first; SingularMatrix propagates from the factorization.
double sigma_min_estimate(const Matrix& a, SpectralOptions opts = {});

}  // namespace ave
