#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ave/problem.hpp"
#include "ave/solvers.hpp"

namespace ave {

enum class Measure { Time, Iterations };

std::string to_string(Measure m);
Measure parse_measure(const std::string& s);

struct BenchProblem {
    std::string id;
    AveProblem problem;
    std::uint64_t x0_seed = 0;
};

struct BenchRecord {
    std::string problem_id;
    std::string solver_id;
    /// Mean wall time over the repeats, in seconds.
    double mean_time = 0.0;
    /// Iteration count of the first run.
    std::size_t iterations = 0;
    /// Unset when the solver threw; `error` then holds the message.
    std::optional<SolveStatus> status;
    std::string error;

    bool converged() const { return status == SolveStatus::Converged; }
    /// Performance measure: seconds, or max(iterations, 1).
    double value(Measure m) const;
};

struct BenchOptions {
    std::size_t repeats = 5;
    Measure measure = Measure::Time;
};

/// Runs every solver on every problem `repeats` times. Solver exceptions are
/// recorded as failures; the batch never aborts.
std::vector<BenchRecord> run_bench(const std::vector<BenchProblem>& problems,
                                   const std::vector<Method>& solvers, const SolverConfig& cfg,
                                   const BenchOptions& opts = {});

inline constexpr double kDefaultRatioMax = 20.0;

struct ProfileTable {
    std::vector<std::string> problem_ids;
    std::vector<std::string> solver_ids;
    /// ratios[p][s]
    std::vector<std::vector<double>> ratios;
    std::vector<std::vector<bool>> converged;
    double r_max = kDefaultRatioMax;

    bool operator==(const ProfileTable&) const = default;
};

/// r = measure / min over converged solvers, capped at r_max; failures get r_max.
/// Problem and solver order follow first appearance in `records`.
/// Throws IncompleteGrid when a (problem, solver) cell is missing or repeated.
ProfileTable performance_ratios(const std::vector<BenchRecord>& records, Measure measure,
                                double r_max = kDefaultRatioMax);

/// 1, 1.1, ..., r_max.
std::vector<double> linear_tau_grid(double r_max = kDefaultRatioMax);
/// `points` values geometrically spaced from 1 to r_max.
std::vector<double> log_tau_grid(double r_max = kDefaultRatioMax, std::size_t points = 100);

/// (tau, fraction of problems with r <= tau). The grid must ascend from 1.
std::vector<std::pair<double, double>> profile_curve(const ProfileTable& table,
                                                     const std::string& solver_id,
                                                     const std::vector<double>& tau_grid);

struct SolverSummary {
    std::string solver_id;
    double efficiency = 0.0;  // percent of problems with ratio 1
    double robustness = 0.0;  // percent of problems solved
};

std::vector<SolverSummary> efficiency_robustness(const ProfileTable& table);

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_records_csv(std::istream& in, const std::string& source = "<stream>");

/// problem_id, one column per solver.
void write_ratio_csv(std::ostream& out, const ProfileTable& table);
/// Restores ids and ratios; convergence is inferred as ratio < r_max.
ProfileTable read_ratio_csv(std::istream& in, double r_max = kDefaultRatioMax,
                            const std::string& source = "<stream>");
/// tau, one fraction column per solver.
void write_curves_csv(std::ostream& out, const ProfileTable& table,
                      const std::vector<double>& tau_grid);
/// solver, efficiency_percent, robustness_percent
void write_summary_csv(std::ostream& out, const std::vector<SolverSummary>& summary);

std::string bench_manifest_json(const std::vector<std::string>& problem_ids,
                                const std::vector<Method>& solvers, const SolverConfig& cfg,
                                const BenchOptions& opts, double r_max);

}  // namespace ave
