#include "ave/lsqr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ave/errors.hpp"

namespace ave {

namespace {

Vector residual_of(const LinearOperator& a, std::span<const double> rhs, std::span<const double> x) {
    Vector r(rhs.begin(), rhs.end());
    axpy(-1.0, a.apply(x), r);
    return r;  // rhs - A x
}

}  // namespace

LsqrResult lsqr_solve(const LinearOperator& a, std::span<const double> rhs,
                      std::span<const double> x0, const LsqrOptions& opts,
                      const LsqrStopPredicate& stop) {
    if (rhs.size() != a.rows()) throw DimensionMismatch("lsqr_solve: rhs length != rows");
    if (x0.size() != a.cols()) throw DimensionMismatch("lsqr_solve: x0 length != cols");
    if (opts.atol < 0.0 || opts.btol < 0.0) throw ConfigError("lsqr_solve: negative tolerance");

    const std::size_t max_iter = opts.max_inner_iter ? opts.max_inner_iter : 10 * a.cols();
    const double bnorm = norm2(rhs);

    LsqrResult res;
    res.solution.assign(x0.begin(), x0.end());
    Vector& x = res.solution;

    // r tracks rhs - A x through the recurrence r -= step * A w; it is
    // resynchronized with an explicit product before any stop is accepted.
    Vector r = residual_of(a, rhs, x);
    double beta = norm2(r);
    double anorm_sq = 0.0;

    auto tolerance_met = [&](double rn) {
        const double tol = std::max(opts.atol * std::sqrt(anorm_sq) * norm2(x), opts.btol * bnorm);
        return rn <= tol;
    };
    auto wants_stop = [&](std::size_t it, double rn) {
        return tolerance_met(rn) || (stop && stop(it, x, rn));
    };

    res.trace.push_back({0, beta});
    if (beta == 0.0 || wants_stop(0, beta)) {
        res.residual_norm = beta;
        res.stop_reason = LsqrStop::ResidualTol;
        return res;
    }

    Vector u = scale(1.0 / beta, r);
    Vector v = a.apply_transpose(u);
    double alpha = norm2(v);
    const double beta_floor = opts.breakdown_tol * beta;
    const double alpha_floor = opts.breakdown_tol * alpha;
    if (alpha == 0.0) {
        // rhs - A x0 is orthogonal to range(A): x0 already minimizes.
        res.residual_norm = beta;
        res.stop_reason = LsqrStop::Breakdown;
        return res;
    }
    for (double& vi : v) vi /= alpha;
    anorm_sq += alpha * alpha;

    Vector w = v;
    Vector aw_prev(a.rows(), 0.0);
    double w_coef = 0.0;
    double phi_bar = beta;
    double rho_bar = alpha;

    for (std::size_t it = 1; it <= max_iter; ++it) {
        // Golub-Kahan step.
        Vector av = a.apply(v);
        Vector aw = av;
        if (w_coef != 0.0) axpy(-w_coef, aw_prev, aw);
        axpy(-alpha, u, av);
        u = std::move(av);
        beta = norm2(u);

        Vector v_next;
        bool broke = false;
        if (beta > beta_floor) {
            for (double& ui : u) ui /= beta;
            anorm_sq += beta * beta;
            v_next = a.apply_transpose(u);
            axpy(-beta, v, v_next);
            alpha = norm2(v_next);
            if (alpha > alpha_floor) {
                for (double& vi : v_next) vi /= alpha;
                anorm_sq += alpha * alpha;
            } else {
                alpha = 0.0;
                broke = true;
            }
        } else {
            beta = 0.0;
            alpha = 0.0;
            v_next.assign(v.size(), 0.0);
            broke = true;
        }

        // Plane rotation eliminating the subdiagonal beta.
        const double rho = std::hypot(rho_bar, beta);
        if (rho == 0.0) {
            res.stop_reason = LsqrStop::Breakdown;
            res.iterations = it - 1;
            break;
        }
        const double c = rho_bar / rho;
        const double s = beta / rho;
        const double theta = s * alpha;
        rho_bar = -c * alpha;
        const double phi = c * phi_bar;
        phi_bar = s * phi_bar;

        const double step = phi / rho;
        axpy(step, w, x);
        axpy(-step, aw, r);

        w_coef = theta / rho;
        aw_prev = std::move(aw);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = v_next[i] - w_coef * w[i];
        v = std::move(v_next);

        double rn = norm2(r);
        res.iterations = it;
        if (wants_stop(it, rn)) {
            r = residual_of(a, rhs, x);
            rn = norm2(r);
            if (wants_stop(it, rn)) {
                res.trace.push_back({it, rn});
                res.stop_reason = LsqrStop::ResidualTol;
                res.residual_norm = rn;
                return res;
            }
        }
        res.trace.push_back({it, rn});
        if (broke) {
            res.stop_reason = LsqrStop::Breakdown;
            break;
        }
        if (it == max_iter) res.stop_reason = LsqrStop::MaxIter;
    }

    res.residual_norm = norm2(residual_of(a, rhs, x));
    return res;
}

void write_lsqr_trace_csv(std::ostream& out, const LsqrResult& result) {
    out << "iteration,residual_norm\n";
    char buf[64];
    for (const auto& p : result.trace) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", p.iteration, p.residual_norm);
        out << buf;
    }
}

}  // namespace ave
