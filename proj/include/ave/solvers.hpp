#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ave/linalg.hpp"
#include "ave/problem.hpp"

namespace ave {

enum class Method { DRs, InexactDRs, Newton, InexactNewton, SorLike, FixedPoint, FixedPointInverse };

/// Accepts the CLI spellings ("drs", "inexact-drs", "newton", "inexact-newton",
/// "sor-like"/"sor", "fixed-point", "fixed-point-inverse") and the display
/// names returned by to_string. Throws ConfigError otherwise.
Method parse_method(const std::string& name);
std::string to_string(Method m);
/// CLI spelling of a method.
std::string cli_name(Method m);

/// Forcing sequence for the inexact splitting subproblems.
struct AlphaSchedule {
    enum class Kind { Heuristic, Theoretical };
    Kind kind = Kind::Heuristic;
    /// Heuristic: alpha_k = min{1, 1 / max{1, k - k_max}}.
    std::size_t k_max = 10;
    /// Theoretical: error-bound constant; +inf forces alpha_k = 0.
    double mu = std::numeric_limits<double>::infinity();
};

struct SolverConfig {
    double gamma = 1.98;
    GMatrix g = GMatrix::identity();
    double delta = 0.5;
    double epsilon = 1e-8;
    std::size_t max_iter = 1000;
    /// Unset: 1 when ||A^-1|| <= 1/4 is known from the problem's spectral
    /// info, 0.9 otherwise.
    std::optional<double> omega;
    /// Unset: automatic forcing term 0.9999 (1 - 3||A^-1||) / (||A^-1|| (||A|| + 3)).
    std::optional<double> theta;
    double nu = 0.5;
    AlphaSchedule alpha;
    double divergence_threshold = 1e8;
    /// 0 selects 10 * n.
    std::size_t max_inner_iter = 0;
    /// Keep every iterate x^0, x^1, ... in the report.
    bool record_iterates = false;

    /// Benchmark harness settings: failure cutoff of 50 iterations.
    static SolverConfig benchmark();
    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

enum class SolveStatus { Converged, MaxIterReached, Diverged, SingularSystem };

std::string to_string(SolveStatus s);
SolveStatus parse_status(const std::string& s);

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIterReached;
    std::size_t iterations = 0;
    double final_residual_norm = 0.0;
    std::vector<double> residual_history;
    std::vector<double> iterate_norm_history;
    std::size_t inner_iteration_total = 0;
    std::chrono::duration<double> wall_time{0.0};

    Vector solution;
    /// Populated when SolverConfig::record_iterates is set.
    std::vector<Vector> iterates;
    /// Per outer step (inexact methods): forcing value used and inner iterations.
    std::vector<double> alpha_history;
    std::vector<std::size_t> inner_iterations;
    /// Forcing term (inexact Newton) or relaxation (SOR-like) actually used.
    std::optional<double> theta_used;
    std::optional<double> omega_used;
};

/// Timing-free equality used by the determinism checks.
bool same_trajectory(const SolveReport& a, const SolveReport& b);

/// [A - D(x^k)] x - b, evaluated as [A - D(x^k)] (x - x^k) + e(x^k) so that
/// it stays accurate when x is close to x^k.
Vector newton_step_residual(const AveProblem& p, std::span<const double> xk,
                            std::span<const double> x);

/// alpha_k = min{1, 1 / max{1, k - k_max}}.
double heuristic_alpha(std::size_t k, std::size_t k_max);
/// alpha_k = (1 - delta) gamma (2 - gamma) rho / (4 mu ||A^T G|| + 2 gamma rho + lambda_max(G)).
double theoretical_alpha(double delta, double gamma, double rho_k, double mu, double norm_atg,
                         double lambda_max_g);
/// 0.9999 (1 - 3 inv_norm) / (inv_norm (norm_a + 3)); throws ThetaUndefined
/// when inv_norm >= 1/3.
double auto_theta(double inv_norm, double norm_a);

SolveReport drs_exact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0);
SolveReport drs_inexact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0);
SolveReport newton_exact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0);
SolveReport newton_inexact(const AveProblem& p, const SolverConfig& cfg, const Vector& x0);
SolveReport sor_like(const AveProblem& p, const SolverConfig& cfg, const Vector& x0,
                     const Vector& y0);
SolveReport fixed_point(const AveProblem& p, const SolverConfig& cfg, const Vector& x0);
SolveReport fixed_point_inverse(const AveProblem& p, const SolverConfig& cfg, const Vector& x0);

/// Either a seed for the default start x^0 = -100 + 200 rand(n) or an explicit x^0.
using InitialGuess = std::variant<std::uint64_t, Vector>;

/// Uniform dispatch. SOR-like starts from y^0 = x^0.
SolveReport run_solver(Method method, const AveProblem& p, const SolverConfig& cfg,
                       const InitialGuess& start);

/// iteration,residual_norm,iterate_norm,inner_iterations
void write_history_csv(std::ostream& out, const SolveReport& report);

}  // namespace ave
