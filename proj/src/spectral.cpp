#include "ave/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "ave/errors.hpp"

namespace ave {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void normalize(Vector& v) {
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
}

}  // namespace

Vector power_start_vector(std::size_t n) {
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(splitmix64(i) >> 11) * 0x1.0p-53;  // [0, 1)
        v[i] = 1.0 + 0.2 * (u - 0.5);
    }
    if (n > 0) normalize(v);
    return v;
}

double matrix_norm2_estimate(const LinearOperator& a, SpectralOptions opts) {
    const std::size_t n = a.cols();
    if (n == 0 || a.rows() == 0) return 0.0;
    Vector v = power_start_vector(n);
    double lambda_prev = -1.0;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        Vector w = a.apply(v);
        const double lambda = dot(w, w);  // v^T A^T A v with ||v|| = 1
        if (lambda == 0.0) {
            // v landed in the null space: A is zero on this start, retry is pointless.
            return 0.0;
        }
        if (lambda_prev >= 0.0 && std::abs(lambda - lambda_prev) <= opts.tol * lambda) {
            return std::sqrt(lambda);
        }
        lambda_prev = lambda;
        v = a.apply_transpose(w);
        normalize(v);
    }
    throw NoConvergence("matrix_norm2_estimate: no convergence after " +
                        std::to_string(opts.max_iter) + " iterations");
}

double matrix_norm2_estimate(const Matrix& a, SpectralOptions opts) {
    return matrix_norm2_estimate(LinearOperator::of(a), opts);
}

double sigma_min_estimate(const LuFactors& factors, SpectralOptions opts) {
    const std::size_t n = factors.size();
    if (n == 0) return 0.0;
    Vector v = power_start_vector(n);
    double lambda_prev = -1.0;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        // lambda = v^T (A^T A)^{-1} v = ||A^{-T} v||^2.
        Vector w = factors.solve_transpose(v);
        const double lambda = dot(w, w);
        if (!std::isfinite(lambda)) return 0.0;
        if (lambda_prev >= 0.0 && std::abs(lambda - lambda_prev) <= opts.tol * lambda) {
            return 1.0 / std::sqrt(lambda);
        }
        lambda_prev = lambda;
        v = factors.solve(w);
        normalize(v);
    }
    throw NoConvergence("sigma_min_estimate: no convergence after " +
                        std::to_string(opts.max_iter) + " iterations");
}

double sigma_min_estimate(const Matrix& a, SpectralOptions opts) {
    return sigma_min_estimate(lu_factor(a), opts);
}

}  // namespace ave
