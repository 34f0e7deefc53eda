#include "ave/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ave/errors.hpp"
#include "ave/lu.hpp"

namespace ave {

namespace {

void require_len(std::size_t got, std::size_t want, const char* op) {
    if (got != want) {
        throw DimensionMismatch(std::string(op) + ": expected length " + std::to_string(want) +
                                ", got " + std::to_string(got));
    }
}

}  // namespace

void AveProblem::validate() const {
    if (a.rows() != a.cols()) throw DimensionMismatch("AveProblem: A is not square");
    require_len(b.size(), a.rows(), "AveProblem b");
    if (known_solution) {
        require_len(known_solution->size(), a.rows(), "AveProblem known_solution");
        const double rn = norm2(residual(*this, *known_solution));
        if (!(rn <= 1e-10 * (1.0 + norm2(b)))) {
            throw Error("AveProblem: known solution residual " + std::to_string(rn) +
                        " exceeds 1e-10 (1 + ||b||)");
        }
    }
}

AveProblem make_problem(Matrix a, Vector b, std::optional<Vector> known_solution) {
    AveProblem p{std::move(a), std::move(b), std::move(known_solution), std::nullopt};
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------

GMatrix GMatrix::diagonal(Vector entries) {
    if (entries.empty()) throw ConfigError("GMatrix: empty diagonal");
    for (double d : entries) {
        if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("GMatrix: diagonal must be positive");
    }
    GMatrix g;
    g.lambda_min_ = *std::min_element(entries.begin(), entries.end());
    g.lambda_max_ = *std::max_element(entries.begin(), entries.end());
    g.entries_ = std::move(entries);
    return g;
}

Vector GMatrix::apply(std::span<const double> x) const {
    if (is_identity()) return Vector(x.begin(), x.end());
    require_len(x.size(), entries_.size(), "GMatrix::apply");
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = entries_[i] * x[i];
    return y;
}

Vector GMatrix::apply_inverse(std::span<const double> x) const {
    if (is_identity()) return Vector(x.begin(), x.end());
    require_len(x.size(), entries_.size(), "GMatrix::apply_inverse");
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / entries_[i];
    return y;
}

double GMatrix::norm_sq(std::span<const double> x) const {
    if (is_identity()) return dot(x, x);
    require_len(x.size(), entries_.size(), "GMatrix::norm_sq");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += entries_[i] * x[i] * x[i];
    return s;
}

// ---------------------------------------------------------------------------

Vector residual(const AveProblem& p, std::span<const double> x) {
    require_len(x.size(), p.b.size(), "residual");
    Vector e = matvec(p.a, x);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = e[i] - std::abs(x[i]) - p.b[i];
    return e;
}

GlcpMaps glcp_maps(const AveProblem& p, std::span<const double> x) {
    require_len(x.size(), p.b.size(), "glcp_maps");
    const Vector ax = matvec(p.a, x);
    GlcpMaps m{Vector(x.size()), Vector(x.size())};
    for (std::size_t i = 0; i < x.size(); ++i) {
        m.q[i] = ax[i] + x[i] - p.b[i];
        m.f[i] = ax[i] - x[i] - p.b[i];
    }
    return m;
}

Vector residual_via_projection(const AveProblem& p, std::span<const double> x) {
    const GlcpMaps m = glcp_maps(p, x);
    Vector e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = m.q[i] - std::max(m.q[i] - m.f[i], 0.0);
    return e;
}

double rho(const GMatrix& g, std::span<const double> e) {
    const double num = dot(e, e);
    if (num == 0.0) throw ZeroResidual("rho: residual is zero");
    if (g.is_identity()) return 1.0;
    const Vector ginv_e = g.apply_inverse(e);
    return num / dot(e, ginv_e);
}

Vector theta_k(const AveProblem& p, const GMatrix& g, double gamma, std::span<const double> xk,
               std::span<const double> x) {
    const Vector ek = residual(p, xk);
    const double r = rho(g, ek);
    const Vector ginv_e = g.apply_inverse(ek);
    require_len(x.size(), xk.size(), "theta_k");
    // 2 A (x - x^k) rather than 2 A x - 2 A x^k: near convergence the two
    // products cancel to far below their own rounding error.
    Vector out = matvec(p.a, subtract(x, xk));
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * out[i] + gamma * r * ginv_e[i];
    return out;
}

// ---------------------------------------------------------------------------

const char* to_string(Regime r) {
    switch (r) {
        case Regime::StrictlyMonotone: return "StrictlyMonotone";
        case Regime::BoundaryMonotone: return "BoundaryMonotone";
        case Regime::NotCovered: return "NotCovered";
    }
    return "?";
}

Regime classify_regime(double sigma_min) {
    if (std::abs(sigma_min - 1.0) <= kBoundaryTolerance) return Regime::BoundaryMonotone;
    return sigma_min > 1.0 ? Regime::StrictlyMonotone : Regime::NotCovered;
}

SolvabilityReport check_solvability(const AveProblem& p, SpectralOptions opts) {
    SolvabilityReport rep;
    const std::size_t n = p.size();
    try {
        rep.sigma_min = sigma_min_estimate(lu_factor(p.a), opts);
    } catch (const SingularMatrix&) {
        rep.sigma_min = 0.0;
        rep.singular = true;
    }
    rep.inv_norm = rep.sigma_min > 0.0 ? 1.0 / rep.sigma_min
                                       : std::numeric_limits<double>::infinity();
    rep.norm_a = matrix_norm2_estimate(p.a, opts);
    rep.regime = classify_regime(rep.sigma_min);

    for (int step = 1; step <= 99; ++step) {
        const double nu = step / 100.0;
        LinearOperator shifted(
            n, n,
            [&](std::span<const double> x) {
                Vector y = matvec(p.a, x);
                for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - nu * y[i];
                return y;
            },
            [&](std::span<const double> x) {
                Vector y = matvec_transpose(p.a, x);
                for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - nu * y[i];
                return y;
            });
        const double norm = matrix_norm2_estimate(shifted, opts);
        if (norm < 1.0 - nu) {
            rep.banach_nu = nu;
            break;
        }
    }
    return rep;
}

}  // namespace ave
