// ave: generate, solve, check and benchmark absolute value equations.
//
// Exit codes for `solve`: 0 Converged, 2 Diverged, 3 MaxIterReached,
// 4 SingularSystem, 1 any error (bad input, ThetaUndefined, ...).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ave/bench.hpp"
#include "ave/bundle.hpp"
#include "ave/errors.hpp"
#include "ave/generators.hpp"
#include "ave/matrix_market.hpp"
#include "ave/problem.hpp"
#include "ave/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenerateArgs {
    std::string family = "random";
    std::size_t n = 0;
    double density = 0.1;
    double sigma_min = 1.0;
    double margin = 0.05;
    std::uint64_t seed = 0;
    std::string out;
    std::string matrix, rhs, solution;
};

struct SolveArgs {
    std::string problem;
    std::string method;
    double gamma = 1.98;
    double eps = 1e-8;
    std::size_t max_iter = 1000;
    std::string omega = "auto";
    std::string theta = "auto";
    double nu = 0.5;
    double delta = 0.5;
    std::string alpha = "heuristic";
    std::size_t k_max = 10;
    double mu = std::numeric_limits<double>::infinity();
    double divergence_threshold = 1e8;
    std::size_t max_inner_iter = 0;
    std::string g_diag;
    std::uint64_t seed = 0;
    std::string x0;
    std::string trace;
    std::string config;
    std::string out;
};

struct BenchArgs {
    std::vector<std::string> problems;
    std::size_t count = 10;
    std::size_t n = 200;
    double density = 0.1;
    double sigma_min = 1.05;
    double margin = 0.05;
    std::uint64_t seed = 0;
    std::string solvers = "inexact-drs,drs,sor-like";
    std::size_t repeats = 5;
    double rmax = ave::kDefaultRatioMax;
    std::string measure = "time";
    std::size_t max_iter = 50;
    bool log_tau = false;
    std::string out;
};

struct ProfileArgs {
    std::string records;
    std::string measure = "time";
    double rmax = ave::kDefaultRatioMax;
    bool log_tau = false;
    std::string out;
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ave::IoError("cannot write " + path.string());
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ave::IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<double> auto_or_number(const std::string& s, const char* flag) {
    if (s == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ave::ConfigError(std::string(flag) + " expects 'auto' or a number, got '" + s + "'");
    }
}

std::vector<ave::Method> parse_method_list(const std::string& csv) {
    std::vector<ave::Method> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(ave::parse_method(tok));
    }
    if (out.empty()) throw ave::ConfigError("--solvers: empty list");
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// A bundle directory, or the built-in name "nosol1d".
ave::AveProblem load_problem_arg(const std::string& arg) {
    if (!fs::exists(arg) && arg == "nosol1d") return ave::gen_no_solution_1d().problem;
    return ave::load_problem(arg).problem;
}

// ---------------------------------------------------------------------------

int cmd_generate(const GenerateArgs& a) {
    const ave::Family family = ave::parse_family(a.family);
    ave::GeneratedProblem g;
    switch (family) {
        case ave::Family::Tridiag8:
            if (a.n == 0) throw ave::ConfigError("--n is required for tridiag8");
            g = ave::gen_tridiag8(a.n);
            break;
        case ave::Family::RandomSparse:
            if (a.n == 0) throw ave::ConfigError("--n is required for random");
            g = ave::gen_random_sparse({a.n, a.density, a.sigma_min, a.margin}, a.seed);
            break;
        case ave::Family::NoSolution1D:
            g = ave::gen_no_solution_1d();
            break;
        case ave::Family::Custom: {
            if (a.matrix.empty() || a.rhs.empty()) {
                throw ave::ConfigError("custom family needs --matrix and --rhs");
            }
            std::optional<ave::Vector> xs;
            if (!a.solution.empty()) xs = ave::read_vector(fs::path(a.solution));
            g.problem = ave::make_problem(ave::read_matrix_market(fs::path(a.matrix)),
                                          ave::read_vector(fs::path(a.rhs)), std::move(xs));
            g.manifest.family = "custom";
            g.manifest.n = g.problem.size();
            const double nn = static_cast<double>(g.manifest.n);
            g.manifest.density_achieved = static_cast<double>(g.problem.a.nnz()) / (nn * nn);
            break;
        }
    }
    ave::save_problem(a.out, g.problem, g.manifest);
    std::cout << "family " << g.manifest.family << "\n"
              << "n " << g.manifest.n << "\n"
              << "density_achieved " << fmt(g.manifest.density_achieved) << "\n";
    if (g.manifest.sigma_min_achieved) {
        std::cout << "sigma_min_achieved " << fmt(*g.manifest.sigma_min_achieved) << "\n";
    }
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

void apply_config_file(const std::string& path, SolveArgs& a) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ave::ParseError(path, 0, e.what());
    }
    auto num_or_auto = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    try {
        for (auto& [key, v] : j.items()) {
            if (key == "method") a.method = v.get<std::string>();
            else if (key == "gamma") a.gamma = v.get<double>();
            else if (key == "epsilon" || key == "eps") a.eps = v.get<double>();
            else if (key == "max_iter") a.max_iter = v.get<std::size_t>();
            else if (key == "omega") a.omega = num_or_auto(v);
            else if (key == "theta") a.theta = num_or_auto(v);
            else if (key == "nu") a.nu = v.get<double>();
            else if (key == "delta") a.delta = v.get<double>();
            else if (key == "alpha_schedule") a.alpha = v.get<std::string>();
            else if (key == "k_max") a.k_max = v.get<std::size_t>();
            else if (key == "mu") a.mu = v.get<double>();
            else if (key == "divergence_threshold") a.divergence_threshold = v.get<double>();
            else if (key == "max_inner_iter") a.max_inner_iter = v.get<std::size_t>();
            else if (key == "seed") a.seed = v.get<std::uint64_t>();
            else if (key == "g_diag") a.g_diag = v.get<std::string>();
            else throw ave::ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ave::ConfigError(path + ": " + e.what());
    }
}

int exit_code(ave::SolveStatus s) {
    switch (s) {
        case ave::SolveStatus::Converged: return 0;
        case ave::SolveStatus::Diverged: return 2;
        case ave::SolveStatus::MaxIterReached: return 3;
        case ave::SolveStatus::SingularSystem: return 4;
    }
    return 1;
}

int cmd_solve(SolveArgs a, const CLI::App& sub) {
    if (!a.config.empty()) apply_config_file(a.config, a);
    if (a.method.empty()) throw ave::ConfigError("--method is required");
    const ave::Method method = ave::parse_method(a.method);

    if (sub.count("--theta") && method != ave::Method::InexactNewton) {
        throw ave::ConfigError("--theta only applies to inexact-newton");
    }
    if (sub.count("--omega") && method != ave::Method::SorLike) {
        throw ave::ConfigError("--omega only applies to sor-like");
    }
    if ((sub.count("--alpha") || sub.count("--mu") || sub.count("--k-max")) &&
        method != ave::Method::InexactDRs) {
        throw ave::ConfigError("--alpha, --mu and --k-max only apply to inexact-drs");
    }

    const ave::AveProblem p = load_problem_arg(a.problem);

    ave::SolverConfig cfg;
    cfg.gamma = a.gamma;
    cfg.epsilon = a.eps;
    cfg.max_iter = a.max_iter;
    cfg.omega = auto_or_number(a.omega, "--omega");
    cfg.theta = auto_or_number(a.theta, "--theta");
    cfg.nu = a.nu;
    cfg.delta = a.delta;
    if (a.alpha == "heuristic") {
        cfg.alpha.kind = ave::AlphaSchedule::Kind::Heuristic;
    } else if (a.alpha == "theoretical") {
        cfg.alpha.kind = ave::AlphaSchedule::Kind::Theoretical;
    } else {
        throw ave::ConfigError("--alpha expects heuristic or theoretical");
    }
    cfg.alpha.k_max = a.k_max;
    cfg.alpha.mu = a.mu;
    cfg.divergence_threshold = a.divergence_threshold;
    cfg.max_inner_iter = a.max_inner_iter;
    if (!a.g_diag.empty()) cfg.g = ave::GMatrix::diagonal(ave::read_vector(fs::path(a.g_diag)));
    cfg.validate();

    ave::InitialGuess start = a.seed;
    if (!a.x0.empty()) start = ave::read_vector(fs::path(a.x0));

    const ave::SolveReport rep = ave::run_solver(method, p, cfg, start);

    std::cout << "method " << ave::to_string(method) << "\n"
              << "status " << ave::to_string(rep.status) << "\n"
              << "iterations " << rep.iterations << "\n"
              << "final_residual " << fmt(rep.final_residual_norm) << "\n"
              << "inner_iterations " << rep.inner_iteration_total << "\n"
              << "wall_time_s " << fmt(rep.wall_time.count()) << "\n";
    if (rep.theta_used) std::cout << "theta " << fmt(*rep.theta_used) << "\n";
    if (rep.omega_used) std::cout << "omega " << fmt(*rep.omega_used) << "\n";
    if (p.known_solution) {
        const double err = ave::norm2(ave::subtract(rep.solution, *p.known_solution));
        std::cout << "error_vs_known " << fmt(err) << "\n";
    }

    if (!a.trace.empty()) {
        std::ofstream out(a.trace);
        if (!out) throw ave::IoError("cannot write " + a.trace);
        ave::write_history_csv(out, rep);
    }
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        ave::write_vector(fs::path(a.out) / "solution.txt", rep.solution);
        std::ofstream h(fs::path(a.out) / "history.csv");
        ave::write_history_csv(h, rep);
    }
    return exit_code(rep.status);
}

int cmd_check(const std::string& problem) {
    const ave::AveProblem p = load_problem_arg(problem);
    const ave::SolvabilityReport r = ave::check_solvability(p);
    std::cout << "n " << p.size() << "\n"
              << "sigma_min " << fmt(r.sigma_min) << "\n"
              << "norm_A " << fmt(r.norm_a) << "\n"
              << "norm_A_inv " << fmt(r.inv_norm) << "\n"
              << "regime " << ave::to_string(r.regime) << "\n"
              << "banach_nu " << (r.banach_nu ? fmt(*r.banach_nu) : std::string("none")) << "\n";
    if (r.singular) std::cout << "singular yes\n";
    return 0;
}

void emit_profiles(const ave::ProfileTable& table, const fs::path& out, bool log_tau) {
    const auto grid = log_tau ? ave::log_tau_grid(table.r_max) : ave::linear_tau_grid(table.r_max);
    std::ofstream ratios(out / "ratios.csv");
    ave::write_ratio_csv(ratios, table);
    std::ofstream curves(out / "curves.csv");
    ave::write_curves_csv(curves, table, grid);
    const auto summary = ave::efficiency_robustness(table);
    std::ofstream sum(out / "summary.csv");
    ave::write_summary_csv(sum, summary);

    std::printf("%-20s %14s %14s\n", "solver", "efficiency(%)", "robustness(%)");
    for (const auto& s : summary) {
        std::printf("%-20s %14.1f %14.1f\n", s.solver_id.c_str(), s.efficiency, s.robustness);
    }
}

int cmd_bench(const BenchArgs& a) {
    const std::vector<ave::Method> solvers = parse_method_list(a.solvers);
    std::vector<ave::BenchProblem> problems;
    if (!a.problems.empty()) {
        for (const auto& dir : a.problems) {
            ave::LoadedProblem lp = ave::load_problem(dir);
            problems.push_back({fs::path(dir).filename().string(), std::move(lp.problem), a.seed});
        }
    } else {
        for (std::size_t i = 0; i < a.count; ++i) {
            const std::uint64_t s = ave::derive_seed(a.seed, i);
            auto g = ave::gen_random_sparse({a.n, a.density, a.sigma_min, a.margin}, s);
            problems.push_back({"p" + std::to_string(i), std::move(g.problem), s});
        }
    }
    ave::SolverConfig cfg = ave::SolverConfig::benchmark();
    cfg.max_iter = a.max_iter;
    const ave::BenchOptions opts{a.repeats, ave::parse_measure(a.measure)};

    const auto records = ave::run_bench(problems, solvers, cfg, opts);
    fs::create_directories(a.out);
    {
        std::ofstream rec(fs::path(a.out) / "records.csv");
        ave::write_records_csv(rec, records);
    }
    std::vector<std::string> ids;
    for (const auto& p : problems) ids.push_back(p.id);
    write_file(fs::path(a.out) / "bench.json",
               ave::bench_manifest_json(ids, solvers, cfg, opts, a.rmax));
    emit_profiles(ave::performance_ratios(records, opts.measure, a.rmax), a.out, a.log_tau);
    return 0;
}

int cmd_profile(const ProfileArgs& a) {
    std::ifstream in(a.records);
    if (!in) throw ave::IoError("cannot open " + a.records);
    const auto records = ave::read_records_csv(in, a.records);
    fs::create_directories(a.out);
    emit_profiles(ave::performance_ratios(records, ave::parse_measure(a.measure), a.rmax), a.out,
                  a.log_tau);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solvers and diagnostics for absolute value equations A x - |x| - b = 0"};
    app.require_subcommand(1);

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Write a problem bundle");
    gen->add_option("--family", ga.family, "tridiag8 | random | nosol1d | custom")
        ->capture_default_str();
    gen->add_option("--n", ga.n, "Problem size");
    gen->add_option("--density", ga.density, "Target density (random)")->capture_default_str();
    gen->add_option("--sigma-min", ga.sigma_min, "Target smallest singular value (random)")
        ->capture_default_str();
    gen->add_option("--margin", ga.margin, "Relative margin above the target (random)")
        ->capture_default_str();
    gen->add_option("--seed", ga.seed, "Master seed")->capture_default_str();
    gen->add_option("--matrix", ga.matrix, "Matrix Market file (custom)");
    gen->add_option("--rhs", ga.rhs, "Right-hand side vector file (custom)");
    gen->add_option("--solution", ga.solution, "Known solution vector file (custom)");
    gen->add_option("--out", ga.out, "Bundle directory")->required();

    SolveArgs sa;
    auto* sol = app.add_subcommand("solve", "Run one solver on a problem bundle");
    sol->add_option("--problem", sa.problem, "Bundle directory (or nosol1d)")->required();
    sol->add_option("--method", sa.method,
                    "drs | inexact-drs | newton | inexact-newton | sor-like | fixed-point | "
                    "fixed-point-inverse");
    sol->add_option("--gamma", sa.gamma, "DRs relaxation in (0, 2)")->capture_default_str();
    sol->add_option("--eps", sa.eps, "Stopping tolerance on ||e(x)||")->capture_default_str();
    sol->add_option("--max-iter", sa.max_iter, "Outer iteration cap")->capture_default_str();
    sol->add_option("--omega", sa.omega, "SOR-like relaxation or auto")->capture_default_str();
    sol->add_option("--theta", sa.theta, "Inexact Newton forcing term or auto")
        ->capture_default_str();
    sol->add_option("--nu", sa.nu, "Fixed-point step in (0, 1)")->capture_default_str();
    sol->add_option("--delta", sa.delta, "Inexactness slack in (0, 1)")->capture_default_str();
    sol->add_option("--alpha", sa.alpha, "heuristic | theoretical")->capture_default_str();
    sol->add_option("--k-max", sa.k_max, "Heuristic schedule offset")->capture_default_str();
    sol->add_option("--mu", sa.mu, "Error-bound constant (theoretical schedule)");
    sol->add_option("--divergence-threshold", sa.divergence_threshold,
                    "Diverged once ||x|| reaches this")
        ->capture_default_str();
    sol->add_option("--max-inner-iter", sa.max_inner_iter, "LSQR cap (0 = 10 n)")
        ->capture_default_str();
    sol->add_option("--g-diag", sa.g_diag, "File with the positive diagonal of G");
    sol->add_option("--seed", sa.seed, "Seed for x0 = -100 + 200 rand(n)")->capture_default_str();
    sol->add_option("--x0", sa.x0, "Explicit start vector file");
    sol->add_option("--trace", sa.trace, "CSV residual history");
    sol->add_option("--config", sa.config, "JSON run configuration (overrides flags)");
    sol->add_option("--out", sa.out, "Directory for solution.txt and history.csv");

    std::string check_problem;
    auto* chk = app.add_subcommand("check", "Solvability diagnostics");
    chk->add_option("--problem", check_problem, "Bundle directory (or nosol1d)")->required();

    BenchArgs ba;
    auto* ben = app.add_subcommand("bench", "Benchmark solvers and write performance profiles");
    ben->add_option("--problems", ba.problems, "Bundle directories (default: generate)");
    ben->add_option("--count", ba.count, "Generated problem count")->capture_default_str();
    ben->add_option("--n", ba.n, "Generated problem size")->capture_default_str();
    ben->add_option("--density", ba.density, "Generated density")->capture_default_str();
    ben->add_option("--sigma-min", ba.sigma_min, "Generated sigma_min target")->capture_default_str();
    ben->add_option("--margin", ba.margin, "Generated margin")->capture_default_str();
    ben->add_option("--seed", ba.seed, "Master seed")->capture_default_str();
    ben->add_option("--solvers", ba.solvers, "Comma-separated methods")->capture_default_str();
    ben->add_option("--repeats", ba.repeats, "Runs per cell")->capture_default_str();
    ben->add_option("--rmax", ba.rmax, "Ratio assigned to failures")->capture_default_str();
    ben->add_option("--measure", ba.measure, "time | iterations")->capture_default_str();
    ben->add_option("--max-iter", ba.max_iter, "Failure cutoff")->capture_default_str();
    ben->add_flag("--log-tau", ba.log_tau, "Log-spaced tau grid");
    ben->add_option("--out", ba.out, "Output directory")->required();

    ProfileArgs pa;
    auto* pro = app.add_subcommand("profile", "Recompute profiles from records.csv");
    pro->add_option("--records", pa.records, "records.csv from bench")->required();
    pro->add_option("--measure", pa.measure, "time | iterations")->capture_default_str();
    pro->add_option("--rmax", pa.rmax, "Ratio assigned to failures")->capture_default_str();
    pro->add_flag("--log-tau", pa.log_tau, "Log-spaced tau grid");
    pro->add_option("--out", pa.out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_generate(ga);
        if (*sol) return cmd_solve(sa, *sol);
        if (*chk) return cmd_check(check_problem);
        if (*ben) return cmd_bench(ba);
        if (*pro) return cmd_profile(pa);
    } catch (const ave::ThetaUndefined& e) {
        std::cerr << "error: ThetaUndefined: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
