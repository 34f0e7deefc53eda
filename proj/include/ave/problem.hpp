#pragma once

#include <optional>
#include <span>
#include <utility>

#include "ave/linalg.hpp"
#include "ave/spectral.hpp"

namespace ave {

/// Singular-value facts known about A ahead of time (e.g. from the generator).
struct SpectralInfo {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

/// The absolute value equation A x - |x| - b = 0.
struct AveProblem {
    Matrix a;
    Vector b;
    std::optional<Vector> known_solution;
    std::optional<SpectralInfo> spectral;

    std::size_t size() const { return b.size(); }
    /// Checks squareness, lengths, and the known-solution residual bound
    /// ||e(x*)|| <= 1e-10 (1 + ||b||). Throws on violation.
    void validate() const;
};

AveProblem make_problem(Matrix a, Vector b, std::optional<Vector> known_solution = std::nullopt);

/// Preconditioner G: the identity or a positive diagonal.
class GMatrix {
public:
    static GMatrix identity() { return GMatrix(); }
    /// Entries must be strictly positive.
    static GMatrix diagonal(Vector entries);

    bool is_identity() const noexcept { return entries_.empty(); }
    const Vector& entries() const noexcept { return entries_; }
    double lambda_min() const noexcept { return lambda_min_; }
    double lambda_max() const noexcept { return lambda_max_; }

    Vector apply(std::span<const double> x) const;
    Vector apply_inverse(std::span<const double> x) const;
    /// ||x||_G^2 = x^T G x.
    double norm_sq(std::span<const double> x) const;

private:
    Vector entries_;
    double lambda_min_ = 1.0;
    double lambda_max_ = 1.0;
};

/// e(x) = A x - |x| - b.
Vector residual(const AveProblem& p, std::span<const double> x);

struct GlcpMaps {
    Vector q;  // A x + x - b
    Vector f;  // A x - x - b
};
GlcpMaps glcp_maps(const AveProblem& p, std::span<const double> x);

/// Q(x) - max(Q(x) - F(x), 0): the projection-equation residual.
Vector residual_via_projection(const AveProblem& p, std::span<const double> x);

/// ||e||^2 / (e^T G^{-1} e). Throws ZeroResidual for e = 0.
double rho(const GMatrix& g, std::span<const double> e);

/// Theta_k(x) = 2 A x - 2 A x^k + gamma rho(x^k) G^{-1} e(x^k).
/// Throws ZeroResidual when e(x^k) = 0.
Vector theta_k(const AveProblem& p, const GMatrix& g, double gamma, std::span<const double> xk,
               std::span<const double> x);

enum class Regime { StrictlyMonotone, BoundaryMonotone, NotCovered };

const char* to_string(Regime r);

inline constexpr double kBoundaryTolerance = 1e-8;

struct SolvabilityReport {
    double sigma_min = 0.0;
    double norm_a = 0.0;
    double inv_norm = 0.0;  // 1 / sigma_min (infinite when singular)
    Regime regime = Regime::NotCovered;
    std::optional<double> banach_nu;
    bool singular = false;
};

Regime classify_regime(double sigma_min);

/// Estimates sigma_min(A) and ||A||, classifies the monotonicity regime and
/// scans nu = 0.01, 0.02, ..., 0.99 for ||I - nu A|| < 1 - nu.
SolvabilityReport check_solvability(const AveProblem& p, SpectralOptions opts = {});

}  // namespace ave
