#include "ave/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ave/errors.hpp"
#include "ave/generators.hpp"
#include "ave/lsqr.hpp"
#include "ave/lu.hpp"
#include "ave/spectral.hpp"

namespace ave {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kInnerRetries = 5;
// Accepted inner solutions keep this relative margin below the forcing bound
// so an independent recomputation of the criterion cannot flip on rounding.
constexpr double kAcceptMargin = 1.0 - 1e-10;

double safe_norm(const Vector& x) {
    const double v = norm2(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

/// Outcome of one outer step: inner iterations spent and the forcing value.
struct StepInfo {
    std::size_t inner = 0;
    std::optional<double> forcing;
};

/// Shared outer loop: stopping rule, divergence detector and bookkeeping.
/// `step(k, x, e)` overwrites x with x^{k+1} given x^k and e(x^k).
template <class Step>
SolveReport drive(const AveProblem& p, const SolverConfig& cfg, const Vector& x0,
                  Clock::time_point started, SolveReport rep, Step&& step) {
    Vector x = x0;
    Vector e = residual(p, x);
    double en = safe_norm(e);
    rep.residual_history.push_back(en);
    rep.iterate_norm_history.push_back(safe_norm(x));
    if (cfg.record_iterates) rep.iterates.push_back(x);

    std::size_t k = 0;
    for (;;) {
        if (en <= cfg.epsilon) {
            rep.status = SolveStatus::Converged;
            break;
        }
        if (k == cfg.max_iter) {
            rep.status = SolveStatus::MaxIterReached;
            break;
        }
        StepInfo info;
        try {
            info = step(k, x, e);
        } catch (const SingularMatrix&) {
            rep.status = SolveStatus::SingularSystem;
            break;
        }
        ++k;
        rep.inner_iterations.push_back(info.inner);
        rep.inner_iteration_total += info.inner;
        if (info.forcing) rep.alpha_history.push_back(*info.forcing);

        const bool finite = all_finite(x);
        const double xn = safe_norm(x);
        if (finite) {
            e = residual(p, x);
            en = safe_norm(e);
        } else {
            en = std::numeric_limits<double>::infinity();
        }
        rep.residual_history.push_back(en);
        rep.iterate_norm_history.push_back(finite ? xn : std::numeric_limits<double>::infinity());
        if (cfg.record_iterates) rep.iterates.push_back(x);

        if (en <= cfg.epsilon) continue;
        if (!finite || xn >= cfg.divergence_threshold) {
            rep.status = SolveStatus::Diverged;
            break;
        }
    }
    rep.iterations = k;
    rep.final_residual_norm = en;
    rep.solution = std::move(x);
    rep.wall_time = Clock::now() - started;
    return rep;
}

void check_inputs(const AveProblem& p, const SolverConfig& cfg, const Vector& x0) {
    cfg.validate();
    if (p.a.rows() != p.a.cols()) throw DimensionMismatch("solver: A is not square");
    if (p.b.size() != p.a.rows()) throw DimensionMismatch("solver: b length != rows of A");
    if (x0.size() != p.size()) throw DimensionMismatch("solver: x0 length != n");
    if (!cfg.g.is_identity() && cfg.g.entries().size() != p.size()) {
        throw DimensionMismatch("solver: G size != n");
    }
}

/// Lazily built LU of a fixed matrix.
class CachedLu {
public:
    explicit CachedLu(const Matrix& a) : a_(a) {}
    const LuFactors& get() {
        if (!lu_) lu_ = lu_factor(a_);
        return *lu_;
    }

private:
    const Matrix& a_;
    std::optional<LuFactors> lu_;
};

/// x <- x - c * A^{-1} G^{-1} e with c = gamma rho / 2.
void drs_lu_step(CachedLu& lu, const SolverConfig& cfg, Vector& x, const Vector& e) {
    const double c = 0.5 * cfg.gamma * rho(cfg.g, e);
    const Vector d = lu.get().solve(cfg.g.apply_inverse(e));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * d[i];
}

/// Solves [A - D(x^k)] x = b in correction form: since D(x^k) x^k = |x^k|,
/// x = x^k - [A - D(x^k)]^{-1} e(x^k). Repeated steps with an unchanged sign
/// pattern then act as iterative refinement instead of returning the same
/// rounded LU solution.
void newton_lu_step(const Matrix& a, Vector& x, const Vector& e) {
    Vector d = sign_diag(x);
    for (double& v : d) v = -v;
    const Vector dx = lu_factor(a.plus_diagonal(d)).solve(e);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dx[i];
}

double known_norm_a(const AveProblem& p) {
    if (p.spectral && p.spectral->sigma_max > 0.0) return p.spectral->sigma_max;
    return matrix_norm2_estimate(p.a);
}

double known_inv_norm(const AveProblem& p) {
    if (p.spectral && p.spectral->sigma_min > 0.0) return 1.0 / p.spectral->sigma_min;
    try {
        return 1.0 / sigma_min_estimate(lu_factor(p.a));
    } catch (const SingularMatrix&) {
        return std::numeric_limits<double>::infinity();
    }
}

/// ||A^T G||: ||A|| for G = I.
double norm_atg(const AveProblem& p, const GMatrix& g) {
    if (g.is_identity()) return known_norm_a(p);
    const std::size_t n = p.size();
    LinearOperator op(
        n, n, [&](std::span<const double> x) { return matvec_transpose(p.a, g.apply(x)); },
        [&](std::span<const double> x) { return g.apply(matvec(p.a, x)); });
    return matrix_norm2_estimate(op);
}

LsqrOptions inner_options(const SolverConfig& cfg) {
    LsqrOptions o;
    o.atol = 0.0;
    o.btol = 0.0;  // stopping is driven by the outer criterion only
    o.max_inner_iter = cfg.max_inner_iter;
    return o;
}

/// Inner solve in correction form: LSQR on `op d = rhs` from d = 0 (that is,
/// warm-started at x^k), asking for ||op d - rhs|| <= lsqr_target and
/// accepting x = x^k + d only when accept(x) holds. The target is halved on
/// each retry, continuing from the previous correction. Returns nullopt when
/// every attempt fails.
template <class Accept>
std::optional<Vector> inner_solve(const LinearOperator& op, const Vector& rhs, const Vector& xk,
                                  double lsqr_target, const SolverConfig& cfg,
                                  std::size_t& inner, Accept&& accept) {
    const LsqrOptions opts = inner_options(cfg);
    Vector d(xk.size(), 0.0);
    double target = lsqr_target;
    for (int attempt = 0; attempt <= kInnerRetries; ++attempt) {
        LsqrResult r = lsqr_solve(op, rhs, d, opts, [target](std::size_t, std::span<const double>,
                                                             double rn) { return rn <= target; });
        inner += r.iterations;
        d = std::move(r.solution);
        Vector x = add(xk, d);
        if (accept(x)) return x;
        target *= 0.5;
    }
    return std::nullopt;
}

/// Smallest forcing bound the stored iterate can honour: rounding x^k + d to
/// doubles perturbs A (x - x^k) by about u ||A|| ||x||.
class RoundingFloor {
public:
    explicit RoundingFloor(const AveProblem& p) : p_(p) {}
    double at(const Vector& xk) {
        if (norm_a_ < 0.0) norm_a_ = known_norm_a(p_);
        const double u = std::numeric_limits<double>::epsilon() / 2.0;
        const double n = static_cast<double>(xk.size());
        return 8.0 * std::sqrt(n) * u * (norm_a_ + 1.0) * norm2(xk);
    }

private:
    const AveProblem& p_;
    double norm_a_ = -1.0;  // computed on first use
};

}  // namespace

// ---------------------------------------------------------------------------

Method parse_method(const std::string& name) {
    if (name == "drs" || name == "DRs") return Method::DRs;
    if (name == "inexact-drs" || name == "InexactDRs") return Method::InexactDRs;
    if (name == "newton" || name == "Newton") return Method::Newton;
    if (name == "inexact-newton" || name == "InexactNewton") return Method::InexactNewton;
    if (name == "sor-like" || name == "sor" || name == "SORlike") return Method::SorLike;
    if (name == "fixed-point" || name == "FixedPoint") return Method::FixedPoint;
    if (name == "fixed-point-inverse" || name == "FixedPointInverse") {
        return Method::FixedPointInverse;
    }
    throw ConfigError("unknown method '" + name + "'");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::DRs: return "DRs";
        case Method::InexactDRs: return "InexactDRs";
        case Method::Newton: return "Newton";
        case Method::InexactNewton: return "InexactNewton";
        case Method::SorLike: return "SORlike";
        case Method::FixedPoint: return "FixedPoint";
        case Method::FixedPointInverse: return "FixedPointInverse";
    }
    return "?";
}

std::string cli_name(Method m) {
    switch (m) {
        case Method::DRs: return "drs";
        case Method::InexactDRs: return "inexact-drs";
        case Method::Newton: return "newton";
        case Method::InexactNewton: return "inexact-newton";
        case Method::SorLike: return "sor-like";
        case Method::FixedPoint: return "fixed-point";
        case Method::FixedPointInverse: return "fixed-point-inverse";
    }
    return "?";
}

SolverConfig SolverConfig::benchmark() {
    SolverConfig c;
    c.max_iter = 50;
    return c;
}

void SolverConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("SolverConfig: " + m); };
    if (!(gamma > 0.0 && gamma < 2.0)) fail("gamma must lie in (0, 2)");
    if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
    if (!(epsilon > 0.0)) fail("epsilon must be positive");
    if (omega && !(*omega > 0.0)) fail("omega must be positive");
    if (theta && !(*theta >= 0.0)) fail("theta must be nonnegative");
    if (!(nu > 0.0 && nu < 1.0)) fail("nu must lie in (0, 1)");
    if (!(divergence_threshold > 0.0)) fail("divergence_threshold must be positive");
    if (alpha.kind == AlphaSchedule::Kind::Theoretical && !(alpha.mu > 0.0)) {
        fail("theoretical alpha schedule needs mu > 0");
    }
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterReached: return "MaxIterReached";
        case SolveStatus::Diverged: return "Diverged";
        case SolveStatus::SingularSystem: return "SingularSystem";
    }
    return "?";
}

SolveStatus parse_status(const std::string& s) {
    if (s == "Converged") return SolveStatus::Converged;
    if (s == "MaxIterReached") return SolveStatus::MaxIterReached;
    if (s == "Diverged") return SolveStatus::Diverged;
    if (s == "SingularSystem") return SolveStatus::SingularSystem;
    throw ConfigError("unknown solve status '" + s + "'");
}

bool same_trajectory(const SolveReport& a, const SolveReport& b) {
    return a.status == b.status && a.iterations == b.iterations &&
           a.final_residual_norm == b.final_residual_norm &&
           a.residual_history == b.residual_history &&
           a.iterate_norm_history == b.iterate_norm_history &&
           a.inner_iteration_total == b.inner_iteration_total && a.solution == b.solution &&
           a.iterates == b.iterates && a.alpha_history == b.alpha_history &&
           a.inner_iterations == b.inner_iterations && a.theta_used == b.theta_used &&
           a.omega_used == b.omega_used;
}

double heuristic_alpha(std::size_t k, std::size_t k_max) {
    const double excess = k > k_max ? static_cast<double>(k - k_max) : 0.0;
    return std::min(1.0, 1.0 / std::max(1.0, excess));
}

double theoretical_alpha(double delta, double gamma, double rho_k, double mu, double norm_atg,
                         double lambda_max_g) {
    if (std::isinf(mu)) return 0.0;
    const double num = (1.0 - delta) * gamma * (2.0 - gamma) * rho_k;
    return num / (4.0 * mu * norm_atg + 2.0 * gamma * rho_k + lambda_max_g);
}

Vector newton_step_residual(const AveProblem& p, std::span<const double> xk,
                            std::span<const double> x) {
    Vector d = sign_diag(xk);
    for (double& v : d) v = -v;
    Vector r = matvec(p.a.plus_diagonal(d), subtract(x, xk));
    axpy(1.0, residual(p, xk), r);
    return r;
}

double auto_theta(double inv_norm, double norm_a) {
    if (!(inv_norm < 1.0 / 3.0)) {
        throw ThetaUndefined("automatic theta needs ||A^-1|| < 1/3, got " +
                             std::to_string(inv_norm));
    }
    return 0.9999 * (1.0 - 3.0 * inv_norm) / (inv_norm * (norm_a + 3.0));
}

// ---------------------------------------------------------------------------

SolveReport drs_exact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0) {
    const auto started = Clock::now();
    check_inputs(p, cfg, x0);
    CachedLu lu(p.a);
    return drive(p, cfg, x0, started, {}, [&](std::size_t, Vector& x, const Vector& e) {
        drs_lu_step(lu, cfg, x, e);
        return StepInfo{};
    });
}

SolveReport drs_inexact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0) {
    const auto started = Clock::now();
    check_inputs(p, cfg, x0);
    CachedLu lu(p.a);
    const LinearOperator op = LinearOperator::of(p.a);
    const bool theoretical = cfg.alpha.kind == AlphaSchedule::Kind::Theoretical;
    RoundingFloor floor(p);
    std::optional<double> atg;
    if (theoretical && std::isfinite(cfg.alpha.mu)) atg = norm_atg(p, cfg.g);

    return drive(p, cfg, x0, started, {}, [&](std::size_t k, Vector& x, const Vector& e) {
        const double rk = rho(cfg.g, e);
        const double alpha =
            theoretical ? theoretical_alpha(cfg.delta, cfg.gamma, rk, cfg.alpha.mu,
                                            atg.value_or(0.0), cfg.g.lambda_max())
                        : heuristic_alpha(k, cfg.alpha.k_max);
        StepInfo info{0, alpha};
        if (alpha == 0.0) {
            drs_lu_step(lu, cfg, x, e);
            return info;
        }
        // Theta_k(x^k + d) = 2 (A d + c G^{-1} e) with c = gamma rho / 2.
        const double en = norm2(e);
        const Vector rhs = scale(-0.5 * cfg.gamma * rk, cfg.g.apply_inverse(e));
        const Vector xk = x;
        const double bound = alpha * en;
        auto next = inner_solve(op, rhs, xk, 0.5 * bound, cfg, info.inner, [&](const Vector& cand) {
            return norm2(theta_k(p, cfg.g, cfg.gamma, xk, cand)) <= bound * kAcceptMargin;
        });
        if (next) {
            x = std::move(*next);
        } else if (bound <= floor.at(xk)) {
            // The bound sits below what a stored iterate can satisfy: take the
            // exact step (alpha_k = 0) instead.
            info.forcing = 0.0;
            drs_lu_step(lu, cfg, x, e);
        } else {
            throw InnerSolverStall("drs_inexact: inner LSQR did not meet the forcing criterion");
        }
        return info;
    });
}

SolveReport newton_exact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0) {
    const auto started = Clock::now();
    check_inputs(p, cfg, x0);
    return drive(p, cfg, x0, started, {}, [&](std::size_t, Vector& x, const Vector& e) {
        newton_lu_step(p.a, x, e);
        return StepInfo{};
    });
}

SolveReport newton_inexact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0) {
    const auto started = Clock::now();
    check_inputs(p, cfg, x0);
    const double theta = cfg.theta ? *cfg.theta : auto_theta(known_inv_norm(p), known_norm_a(p));
    SolveReport rep;
    rep.theta_used = theta;
    RoundingFloor floor(p);

    return drive(p, cfg, x0, started, std::move(rep), [&](std::size_t, Vector& x,
                                                          const Vector& e) {
        Vector d = sign_diag(x);
        for (double& v : d) v = -v;
        const Matrix jac = p.a.plus_diagonal(d);
        StepInfo info{0, theta};
        if (theta == 0.0) {
            newton_lu_step(p.a, x, e);
            return info;
        }
        // [A - D(x^k)] x - b = [A - D(x^k)] (x - x^k) + e(x^k) since D(x^k) x^k = |x^k|.
        const double bound = theta * norm2(e);
        const LinearOperator op = LinearOperator::of(jac);
        const Vector rhs = scale(-1.0, e);
        const Vector xk = x;
        auto next = inner_solve(op, rhs, xk, bound, cfg, info.inner, [&](const Vector& cand) {
            return norm2(newton_step_residual(p, xk, cand)) <= bound * kAcceptMargin;
        });
        if (next) {
            x = std::move(*next);
        } else if (bound <= floor.at(xk)) {
            info.forcing = 0.0;
            newton_lu_step(p.a, x, e);
        } else {
            throw InnerSolverStall("newton_inexact: inner LSQR did not meet the forcing criterion");
        }
        return info;
    });
}

SolveReport sor_like(const AveProblem& p, const SolverConfig& cfg, const Vector& x0,
                     const Vector& y0) {
    const auto started = Clock::now();
    check_inputs(p, cfg, x0);
    if (y0.size() != p.size()) throw DimensionMismatch("sor_like: y0 length != n");
    SolveReport rep;
    CachedLu lu(p.a);
    double omega = 0.9;
    if (cfg.omega) {
        omega = *cfg.omega;
    } else {
        try {
            const double inv = p.spectral && p.spectral->sigma_min > 0.0
                                   ? 1.0 / p.spectral->sigma_min
                                   : 1.0 / sigma_min_estimate(lu.get());
            if (inv <= 0.25) omega = 1.0;
        } catch (const SingularMatrix&) {
            // The first step reports SingularSystem.
        }
    }
    rep.omega_used = omega;
    Vector y = y0;
    return drive(p, cfg, x0, started, std::move(rep), [&](std::size_t, Vector& x, const Vector&) {
        const Vector s = lu.get().solve(add(y, p.b));
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - omega) * x[i] + omega * s[i];
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = (1.0 - omega) * y[i] + omega * std::abs(x[i]);
        }
        return StepInfo{};
    });
}

SolveReport fixed_point(const AveProblem& p, const SolverConfig& cfg, const Vector& x0) {
    const auto started = Clock::now();
    check_inputs(p, cfg, x0);
    return drive(p, cfg, x0, started, {}, [&](std::size_t, Vector& x, const Vector& e) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= cfg.nu * e[i];
        return StepInfo{};
    });
}

SolveReport fixed_point_inverse(const AveProblem& p, const SolverConfig& cfg, const Vector& x0) {
    const auto started = Clock::now();
    check_inputs(p, cfg, x0);
    CachedLu lu(p.a);
    return drive(p, cfg, x0, started, {}, [&](std::size_t, Vector& x, const Vector& e) {
        const Vector d = lu.get().solve(e);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= cfg.nu * d[i];
        return StepInfo{};
    });
}

SolveReport run_solver(Method method, const AveProblem& p, const SolverConfig& cfg,
                       const InitialGuess& start) {
    const Vector x0 = std::holds_alternative<Vector>(start)
                          ? std::get<Vector>(start)
                          : gen_x0(p.size(), std::get<std::uint64_t>(start));
    switch (method) {
        case Method::DRs: return drs_exact(p, cfg, x0);
        case Method::InexactDRs: return drs_inexact(p, cfg, x0);
        case Method::Newton: return newton_exact(p, cfg, x0);
        case Method::InexactNewton: return newton_inexact(p, cfg, x0);
        case Method::SorLike: return sor_like(p, cfg, x0, x0);
        case Method::FixedPoint: return fixed_point(p, cfg, x0);
        case Method::FixedPointInverse: return fixed_point_inverse(p, cfg, x0);
    }
    throw ConfigError("run_solver: unknown method");
}

void write_history_csv(std::ostream& out, const SolveReport& report) {
    out << "iteration,residual_norm,iterate_norm,inner_iterations\n";
    char buf[128];
    for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
        const std::size_t inner =
            i > 0 && i - 1 < report.inner_iterations.size() ? report.inner_iterations[i - 1] : 0;
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%zu\n", i, report.residual_history[i],
                      report.iterate_norm_history[i], inner);
        out << buf;
    }
}

}  // namespace ave
