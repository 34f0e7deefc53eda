// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
// Oracles (residuals, A-weighted distances, dense LU solutions) are computed
// with Eigen, independently of the library's kernels. The inexact forcing
// criterion is re-evaluated from the recorded iterates with ave::theta_k,
// outside the inner solver.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ave/bench.hpp"
#include "ave/generators.hpp"
#include "ave/lsqr.hpp"
#include "ave/problem.hpp"
#include "ave/solvers.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using EVec = Eigen::VectorXd;
using ESp = Eigen::SparseMatrix<double, Eigen::RowMajor>;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

EVec to_eigen(const ave::Vector& v) { return Eigen::Map<const EVec>(v.data(), v.size()); }

ESp to_eigen(const ave::Matrix& a) {
    std::vector<Eigen::Triplet<double>> t;
    if (const auto* s = a.sparse()) {
        for (const auto& e : s->triplets()) t.emplace_back(e.row, e.col, e.value);
    } else {
        const auto& d = *a.dense();
        for (std::size_t j = 0; j < d.cols(); ++j)
            for (std::size_t i = 0; i < d.rows(); ++i)
                if (d(i, j) != 0.0) t.emplace_back(i, j, d(i, j));
    }
    ESp m(a.rows(), a.cols());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

EVec eigen_residual(const ESp& a, const EVec& b, const EVec& x) {
    return a * x - x.cwiseAbs() - b;
}

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
    std::printf("%s criterion %d: %s", o.pass ? "PASS" : "FAIL", id, title.c_str());
    if (!o.detail.empty()) std::printf(" [%s]", o.detail.c_str());
    std::printf("\n");
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

void run(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.fail(std::string("exception: ") + e.what());
    }
    report(id, title, o);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ave::RandomSparseParams random_params(std::size_t n, double target) {
    return {n, 0.1, target, 0.0};
}

constexpr std::uint64_t kSeedBase = 20240101;

// Problems shared by criteria 1-3.
struct Case {
    std::string name;
    ave::AveProblem problem;
    ave::Vector x0;
};

std::vector<Case> tridiag_cases() {
    std::vector<Case> out;
    for (std::size_t n : {1000u, 4000u}) {
        for (std::uint64_t s = 0; s < 3; ++s) {
            out.push_back({"tridiag8 n=" + std::to_string(n) + " seed=" + std::to_string(s),
                           ave::gen_tridiag8(n).problem, ave::gen_x0(n, kSeedBase + s)});
        }
    }
    return out;
}

std::vector<Case> random_cases(double target, std::size_t count, std::size_t n = 200) {
    std::vector<Case> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t s = ave::derive_seed(kSeedBase, i);
        out.push_back({"random#" + std::to_string(i),
                       ave::gen_random_sparse(random_params(n, target), s).problem,
                       ave::gen_x0(n, s)});
    }
    return out;
}

// -- Criterion 3 helpers ------------------------------------------------------

/// Checks ||A(x^{k+1} - x*)||^2 <= ||A(x^k - x*)||^2 - gamma (2 - gamma)/4 ||e(x^k)||^2 + slack
/// along the recorded exact DRs iterates (G = I, rho = 1).
void check_fejer(const Case& c, const ave::SolveReport& rep, double gamma, Outcome& o,
                 std::size_t& checked) {
    const ESp a = to_eigen(c.problem.a);
    const EVec b = to_eigen(c.problem.b);
    const EVec xs = to_eigen(*c.problem.known_solution);
    const double d0 = (a * (to_eigen(rep.iterates.front()) - xs)).squaredNorm();
    const double slack = 1e-8 * (1.0 + d0);
    for (std::size_t k = 0; k + 1 < rep.iterates.size(); ++k) {
        const EVec xk = to_eigen(rep.iterates[k]);
        const EVec xk1 = to_eigen(rep.iterates[k + 1]);
        const double lhs = (a * (xk1 - xs)).squaredNorm();
        const double ek = eigen_residual(a, b, xk).squaredNorm();
        const double rhs = (a * (xk - xs)).squaredNorm() - gamma * (2.0 - gamma) / 4.0 * ek;
        ++checked;
        if (!(lhs <= rhs + slack)) {
            o.fail(c.name + " k=" + std::to_string(k) + ": " + fmt("%.6g", lhs) + " > " +
                   fmt("%.6g", rhs + slack));
        }
    }
}

void check_inexact_criterion(const Case& c, const ave::SolveReport& rep,
                             const ave::SolverConfig& cfg, Outcome& o, std::size_t& checked) {
    if (rep.alpha_history.size() + 1 != rep.iterates.size()) {
        o.fail(c.name + ": alpha history length mismatch");
        return;
    }
    for (std::size_t k = 0; k + 1 < rep.iterates.size(); ++k) {
        const auto& xk = rep.iterates[k];
        const auto& xk1 = rep.iterates[k + 1];
        const double lhs = ave::norm2(ave::theta_k(c.problem, cfg.g, cfg.gamma, xk, xk1));
        const double rhs = rep.alpha_history[k] * ave::norm2(ave::residual(c.problem, xk));
        ++checked;
        if (!(lhs <= rhs)) {
            o.fail(c.name + " k=" + std::to_string(k) + ": ||Theta|| " + fmt("%.6g", lhs) +
                   " > " + fmt("%.6g", rhs));
        }
    }
}

}  // namespace

int main() {
    const auto tri = tridiag_cases();
    const auto rnd = random_cases(1.05, 20);

    // 1 ---------------------------------------------------------------------
    std::vector<ave::SolveReport> tri_drs;
    run(1, "tridiag8 n in {1000, 4000}: DRs and SOR-like (omega = 1) reach 1e-8 in 15 +- 5 "
           "iterations, < 5 s per solve",
        [&](Outcome& o) {
            ave::SolverConfig drs;
            drs.record_iterates = true;
            ave::SolverConfig sor;
            sor.omega = 1.0;
            std::string its;
            for (const auto& c : tri) {
                for (int which = 0; which < 2; ++which) {
                    const auto t0 = Clock::now();
                    const auto rep = which == 0 ? ave::drs_exact(c.problem, drs, c.x0)
                                                : ave::sor_like(c.problem, sor, c.x0, c.x0);
                    const double secs = seconds_since(t0);
                    const std::string who = (which == 0 ? "DRs " : "SOR ") + c.name;
                    its += (its.empty() ? "" : " ") + std::to_string(rep.iterations);
                    if (rep.status != ave::SolveStatus::Converged) o.fail(who + " did not converge");
                    if (rep.iterations < 10 || rep.iterations > 20) {
                        o.fail(who + ": " + std::to_string(rep.iterations) + " iterations");
                    }
                    const double e = eigen_residual(to_eigen(c.problem.a), to_eigen(c.problem.b),
                                                    to_eigen(rep.solution))
                                         .norm();
                    if (!(e <= 1e-8)) o.fail(who + ": recomputed residual " + fmt("%.3g", e));
                    if (secs >= 5.0) o.fail(who + ": " + fmt("%.2f", secs) + " s");
                    if (which == 0) tri_drs.push_back(rep);
                }
            }
            if (o.pass) o.detail = "iterations " + its;
        });

    // 2 ---------------------------------------------------------------------
    std::vector<ave::SolveReport> rnd_drs, rnd_inexact;
    ave::SolverConfig rec_cfg;
    rec_cfg.record_iterates = true;
    run(2, "20 random problems (n = 200, sigma_min 1.05): InexactDRs within 1e-6 of DRs, both "
           "converge, < 30 s total",
        [&](Outcome& o) {
            const auto t0 = Clock::now();
            double worst = 0.0;
            for (const auto& c : rnd) {
                rnd_drs.push_back(ave::drs_exact(c.problem, rec_cfg, c.x0));
                rnd_inexact.push_back(ave::drs_inexact(c.problem, rec_cfg, c.x0));
                const auto& a = rnd_drs.back();
                const auto& b = rnd_inexact.back();
                if (a.status != ave::SolveStatus::Converged) o.fail(c.name + ": DRs not converged");
                if (b.status != ave::SolveStatus::Converged) {
                    o.fail(c.name + ": InexactDRs not converged");
                }
                const double rel = (to_eigen(a.solution) - to_eigen(b.solution)).norm() /
                                   to_eigen(*c.problem.known_solution).norm();
                worst = std::max(worst, rel);
                if (!(rel <= 1e-6)) o.fail(c.name + ": relative gap " + fmt("%.3g", rel));
            }
            const double secs = seconds_since(t0);
            if (secs >= 30.0) o.fail(fmt("%.1f s total", secs));
            if (o.pass) o.detail = "max relative gap " + fmt("%.2e", worst) + ", " + fmt("%.2f s", secs);
        });

    // 3 ---------------------------------------------------------------------
    run(3, "Fejer inequality on every DRs iterate; forcing criterion on every InexactDRs "
           "iterate",
        [&](Outcome& o) {
            std::size_t fejer = 0, forcing = 0;
            if (tri_drs.size() != tri.size() || rnd_drs.size() != rnd.size()) {
                o.fail("criterion 1/2 runs missing");
                return;
            }
            for (std::size_t i = 0; i < tri.size(); ++i) check_fejer(tri[i], tri_drs[i], 1.98, o, fejer);
            for (std::size_t i = 0; i < rnd.size(); ++i) {
                check_fejer(rnd[i], rnd_drs[i], 1.98, o, fejer);
                check_inexact_criterion(rnd[i], rnd_inexact[i], rec_cfg, o, forcing);
            }
            if (o.pass) {
                o.detail = std::to_string(fejer) + " Fejer steps, " + std::to_string(forcing) +
                           " forcing checks";
            }
        });

    // 4 ---------------------------------------------------------------------
    run(4, "x - |x| - 1 = 0 with gamma = 1, x0 = 0: x^k = k/2 exactly, Diverged at the "
           "threshold, < 1 s",
        [&](Outcome& o) {
            const auto p = ave::gen_no_solution_1d().problem;
            ave::SolverConfig cfg;
            cfg.gamma = 1.0;
            cfg.record_iterates = true;
            cfg.divergence_threshold = 1e3;
            cfg.max_iter = 10000;
            const auto t0 = Clock::now();
            const auto rep = ave::drs_exact(p, cfg, {0.0});
            const double secs = seconds_since(t0);
            for (std::size_t k = 0; k <= 100 && k < rep.iterates.size(); ++k) {
                if (rep.iterates[k][0] != static_cast<double>(k) / 2.0) {
                    o.fail("x^" + std::to_string(k) + " = " + fmt("%.17g", rep.iterates[k][0]));
                    break;
                }
            }
            if (rep.iterates.size() < 101) o.fail("fewer than 100 iterates");
            if (rep.status != ave::SolveStatus::Diverged) {
                o.fail("status " + ave::to_string(rep.status));
            }
            const double last = rep.iterate_norm_history.back();
            const double prev = rep.iterate_norm_history[rep.iterate_norm_history.size() - 2];
            if (!(last >= cfg.divergence_threshold && prev < cfg.divergence_threshold)) {
                o.fail("not stopped at first threshold crossing");
            }
            if (secs >= 1.0) o.fail(fmt("%.2f s", secs));
            if (o.pass) {
                o.detail = "threshold 1e3 reached at k = " + std::to_string(rep.iterations);
            }
        });

    // 5 ---------------------------------------------------------------------
    run(5, "20 random problems (sigma_min 3.2): Newton and inexact Newton (auto theta) reach "
           "1e-8 within 50 iterations; theta = 0 matches Newton per iterate, < 60 s total",
        [&](Outcome& o) {
            const auto t0 = Clock::now();
            const auto cases = random_cases(3.2, 20);
            ave::SolverConfig cfg = ave::SolverConfig::benchmark();
            cfg.record_iterates = true;
            ave::SolverConfig zero = cfg;
            zero.theta = 0.0;
            std::size_t max_it = 0;
            for (const auto& c : cases) {
                const ESp a = to_eigen(c.problem.a);
                const EVec b = to_eigen(c.problem.b);
                const auto ex = ave::newton_exact(c.problem, cfg, c.x0);
                const auto in = ave::newton_inexact(c.problem, cfg, c.x0);
                const auto z = ave::newton_inexact(c.problem, zero, c.x0);
                for (const auto* r : {&ex, &in}) {
                    const std::string who = (r == &ex ? "Newton " : "InexactNewton ") + c.name;
                    max_it = std::max(max_it, r->iterations);
                    if (r->status != ave::SolveStatus::Converged) {
                        o.fail(who + ": " + ave::to_string(r->status));
                    }
                    const double e = eigen_residual(a, b, to_eigen(r->solution)).norm();
                    if (!(e <= 1e-8)) o.fail(who + ": residual " + fmt("%.3g", e));
                }
                if (z.iterates.size() != ex.iterates.size()) {
                    o.fail(c.name + ": theta = 0 trajectory length differs");
                    continue;
                }
                for (std::size_t k = 0; k < ex.iterates.size(); ++k) {
                    const double d = (to_eigen(z.iterates[k]) - to_eigen(ex.iterates[k])).norm();
                    if (!(d <= 1e-8)) {
                        o.fail(c.name + ": theta = 0 iterate " + std::to_string(k) + " differs by " +
                               fmt("%.3g", d));
                        break;
                    }
                }
            }
            const double secs = seconds_since(t0);
            if (secs >= 60.0) o.fail(fmt("%.1f s total", secs));
            if (o.pass) {
                o.detail = "max iterations " + std::to_string(max_it) + ", " + fmt("%.2f s", secs);
            }
        });

    // 6 ---------------------------------------------------------------------
    run(6, "fixed_point_inverse(nu = 0.5) == drs_exact(gamma = 1) to 1e-12 over 30 iterations "
           "on 10 problems; residual == projection residual to 1e-12 on 1000 points",
        [&](Outcome& o) {
            ave::SolverConfig fp;
            fp.nu = 0.5;
            fp.max_iter = 30;
            fp.epsilon = 1e-300;
            fp.record_iterates = true;
            ave::SolverConfig dr = fp;
            dr.gamma = 1.0;
            double worst = 0.0;
            for (const auto& c : random_cases(1.05, 10, 100)) {
                const auto a = ave::fixed_point_inverse(c.problem, fp, c.x0);
                const auto b = ave::drs_exact(c.problem, dr, c.x0);
                if (a.iterates.size() != 31 || b.iterates.size() != 31) {
                    o.fail(c.name + ": expected 30 iterations");
                    continue;
                }
                for (std::size_t k = 0; k < a.iterates.size(); ++k) {
                    const EVec xa = to_eigen(a.iterates[k]);
                    const double d = (xa - to_eigen(b.iterates[k])).norm() / std::max(1.0, xa.norm());
                    worst = std::max(worst, d);
                    if (!(d <= 1e-12)) o.fail(c.name + " k=" + std::to_string(k));
                }
            }
            std::mt19937_64 gen(kSeedBase);
            std::uniform_real_distribution<double> u(-10.0, 10.0);
            const auto probs = random_cases(1.05, 5, 20);
            double worst_proj = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const auto& p = probs[static_cast<std::size_t>(i) % probs.size()].problem;
                ave::Vector x(p.size());
                for (double& v : x) v = u(gen);
                const ave::Vector e1 = ave::residual(p, x);
                const ave::Vector e2 = ave::residual_via_projection(p, x);
                const double d = ave::norm2(ave::subtract(e1, e2)) / std::max(1.0, ave::norm2(e1));
                worst_proj = std::max(worst_proj, d);
            }
            if (!(worst_proj <= 1e-12)) o.fail("projection residual gap " + fmt("%.3g", worst_proj));
            if (o.pass) {
                o.detail = "iterate gap " + fmt("%.2e", worst) + ", projection gap " +
                           fmt("%.2e", worst_proj);
            }
        });

    // 7 ---------------------------------------------------------------------
    run(7, "LSQR on 50 systems (n <= 200, cond <= 1e3) matches dense LU to 1e-6; residual traces "
           "nonincreasing",
        [&](Outcome& o) {
            std::mt19937_64 gen(kSeedBase + 7);
            std::normal_distribution<double> g01(0.0, 1.0);
            std::uniform_int_distribution<int> nd(5, 200);
            double worst = 0.0;
            for (int t = 0; t < 50; ++t) {
                const int n = nd(gen);
                Eigen::MatrixXd m1(n, n), m2(n, n);
                for (int i = 0; i < n * n; ++i) {
                    m1.data()[i] = g01(gen);
                    m2.data()[i] = g01(gen);
                }
                const Eigen::MatrixXd q1 = Eigen::HouseholderQR<Eigen::MatrixXd>(m1).householderQ();
                const Eigen::MatrixXd q2 = Eigen::HouseholderQR<Eigen::MatrixXd>(m2).householderQ();
                EVec s(n);
                for (int i = 0; i < n; ++i) s[i] = std::pow(1e3, n > 1 ? double(i) / (n - 1) : 0.0);
                const Eigen::MatrixXd a = q1 * s.asDiagonal() * q2.transpose();
                EVec rhs(n);
                for (int i = 0; i < n; ++i) rhs[i] = g01(gen);
                const EVec ref = a.partialPivLu().solve(rhs);

                ave::DenseMatrix dm(n, n, std::vector<double>(a.data(), a.data() + n * n));
                const ave::Matrix am(dm);
                ave::LsqrOptions opts;
                opts.btol = 1e-10;
                const ave::Vector b(rhs.data(), rhs.data() + n);
                opts.max_inner_iter = 100 * static_cast<std::size_t>(n);
                const auto r = ave::lsqr_solve(ave::LinearOperator::of(am), b,
                                               ave::Vector(n, 0.0), opts);
                const double rel = (to_eigen(r.solution) - ref).norm() / ref.norm();
                worst = std::max(worst, rel);
                if (!(rel <= 1e-6)) o.fail("system " + std::to_string(t) + ": " + fmt("%.3g", rel));
                for (std::size_t i = 1; i < r.trace.size(); ++i) {
                    if (r.trace[i].residual_norm > r.trace[i - 1].residual_norm) {
                        o.fail("system " + std::to_string(t) + ": trace increases at " +
                               std::to_string(i));
                        break;
                    }
                }
            }
            if (o.pass) o.detail = "max relative error " + fmt("%.2e", worst);
        });

    // 8 ---------------------------------------------------------------------
    run(8, "check_solvability: [[1, 2], [-2/3, 1]] boundary, tridiag8 strict, diag(1.8, -2) "
           "without a Banach nu",
        [&](Outcome& o) {
            const auto boundary = ave::check_solvability(ave::make_problem(
                ave::DenseMatrix::from_rows({{1.0, 2.0}, {-2.0 / 3.0, 1.0}}), {0.0, 0.0}));
            if (boundary.regime != ave::Regime::BoundaryMonotone) {
                o.fail(std::string("first case ") + ave::to_string(boundary.regime));
            }
            if (!(std::abs(boundary.sigma_min - 1.0) <= 1e-6)) {
                o.fail("sigma_min " + fmt("%.12g", boundary.sigma_min));
            }
            const auto strict = ave::check_solvability(ave::gen_tridiag8(100).problem);
            if (strict.regime != ave::Regime::StrictlyMonotone) {
                o.fail(std::string("tridiag8 ") + ave::to_string(strict.regime));
            }
            const auto nob = ave::check_solvability(
                ave::make_problem(ave::DenseMatrix::from_rows({{1.8, 0.0}, {0.0, -2.0}}), {0.0, 0.0}));
            if (nob.banach_nu) o.fail("diag(1.8, -2) Banach nu " + fmt("%.2f", *nob.banach_nu));
            if (o.pass) {
                o.detail = "sigma_min " + fmt("%.10f", boundary.sigma_min) + ", tridiag8 " +
                           fmt("%.6f", strict.sigma_min);
            }
        });

    // 9 ---------------------------------------------------------------------
    run(9, "benchmark harness (10 problems x 3 solvers, iteration mode): deterministic tables, "
           "nondecreasing curves, efficiency <= robustness, winners at 1",
        [&](Outcome& o) {
            std::vector<ave::BenchProblem> problems;
            for (std::size_t i = 0; i < 10; ++i) {
                const std::uint64_t s = ave::derive_seed(kSeedBase + 9, i);
                problems.push_back({"p" + std::to_string(i),
                                    ave::gen_random_sparse({200, 0.1, 1.05, 0.05}, s).problem, s});
            }
            const std::vector<ave::Method> solvers{ave::Method::InexactDRs, ave::Method::DRs,
                                                   ave::Method::SorLike};
            const auto cfg = ave::SolverConfig::benchmark();
            const ave::BenchOptions it{1, ave::Measure::Iterations};
            const auto t1 = ave::performance_ratios(ave::run_bench(problems, solvers, cfg, it),
                                                    ave::Measure::Iterations);
            const auto t2 = ave::performance_ratios(ave::run_bench(problems, solvers, cfg, it),
                                                    ave::Measure::Iterations);
            if (!(t1 == t2)) o.fail("profile tables differ between runs");
            const auto grid = ave::linear_tau_grid();
            for (const auto& s : t1.solver_ids) {
                const auto curve = ave::profile_curve(t1, s, grid);
                for (std::size_t i = 1; i < curve.size(); ++i) {
                    if (curve[i].second < curve[i - 1].second) o.fail(s + ": curve decreases");
                }
                if (curve.back().second != 1.0) o.fail(s + ": curve below 1 at r_M");
            }
            for (const auto& row : efficiency_robustness(t1)) {
                if (row.efficiency > row.robustness) o.fail(row.solver_id + ": efficiency > robustness");
            }
            for (std::size_t p = 0; p < t1.problem_ids.size(); ++p) {
                bool any = false;
                double best = t1.r_max;
                for (std::size_t s = 0; s < t1.solver_ids.size(); ++s) {
                    if (t1.converged[p][s]) {
                        any = true;
                        best = std::min(best, t1.ratios[p][s]);
                    }
                }
                if (any && best != 1.0) o.fail(t1.problem_ids[p] + ": no winner at ratio 1");
            }

            // Reported only: which solver wins most often by wall time.
            const auto tt = ave::performance_ratios(
                ave::run_bench(problems, solvers, cfg, {5, ave::Measure::Time}), ave::Measure::Time);
            std::ostringstream info;
            info << "time-mode win % (not gated):";
            for (const auto& row : efficiency_robustness(tt)) {
                info << ' ' << row.solver_id << '=' << fmt("%.0f", row.efficiency);
            }
            o.detail = info.str();
        });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
