#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ave/linalg.hpp"

namespace ave {

struct LsqrOptions {
    double atol = 0.0;
    double btol = 1e-10;
    /// 0 selects the default of 10 * n.
    std::size_t max_inner_iter = 0;
    /// Bidiagonalization vectors shorter than this fraction of the initial
    /// residual norm count as a breakdown.
    double breakdown_tol = 1e-14;
};

enum class LsqrStop { ResidualTol, MaxIter, Breakdown };

struct LsqrTracePoint {
    std::size_t iteration;
    double residual_norm;
};

struct LsqrResult {
    Vector solution;
    std::size_t iterations = 0;
    /// ||A x - rhs|| recomputed from the returned solution.
    double residual_norm = 0.0;
    LsqrStop stop_reason = LsqrStop::MaxIter;
    /// True residual norm after each iteration, iteration 0 being x0.
    std::vector<LsqrTracePoint> trace;
};

/// Extra stopping test evaluated on the true residual every iteration:
/// (iteration, current x, ||A x - rhs||) -> stop?
using LsqrStopPredicate = std::function<bool(std::size_t, std::span<const double>, double)>;

/// Paige-Saunders LSQR for min ||A x - rhs||, warm-started at x0 by solving
/// for the correction d = x - x0 against the shifted right-hand side.
LsqrResult lsqr_solve(const LinearOperator& a, std::span<const double> rhs,
                      std::span<const double> x0, const LsqrOptions& opts = {},
                      const LsqrStopPredicate& stop = {});

void write_lsqr_trace_csv(std::ostream& out, const LsqrResult& result);

}  // namespace ave
