#include "ave/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "ave/errors.hpp"

namespace ave {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& source, std::size_t line) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError(source, line, "not a number: '" + s + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& s, const std::string& source, std::size_t line) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError(source, line, "not a count: '" + s + "'");
    }
    return v;
}

std::size_t index_of(std::vector<std::string>& ids, std::map<std::string, std::size_t>& pos,
                     const std::string& id) {
    auto [it, inserted] = pos.emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
}

}  // namespace

std::string to_string(Measure m) { return m == Measure::Time ? "time" : "iterations"; }

Measure parse_measure(const std::string& s) {
    if (s == "time") return Measure::Time;
    if (s == "iterations") return Measure::Iterations;
    throw ConfigError("unknown measure '" + s + "' (expected time or iterations)");
}

double BenchRecord::value(Measure m) const {
    if (m == Measure::Time) return mean_time;
    return static_cast<double>(std::max<std::size_t>(iterations, 1));
}

std::vector<BenchRecord> run_bench(const std::vector<BenchProblem>& problems,
                                   const std::vector<Method>& solvers, const SolverConfig& cfg,
                                   const BenchOptions& opts) {
    if (opts.repeats < 1) throw ConfigError("run_bench: repeats must be >= 1");
    std::vector<BenchRecord> records;
    records.reserve(problems.size() * solvers.size());
    for (const BenchProblem& bp : problems) {
        for (Method m : solvers) {
            BenchRecord rec;
            rec.problem_id = bp.id;
            rec.solver_id = to_string(m);
            double total = 0.0;
            try {
                for (std::size_t r = 0; r < opts.repeats; ++r) {
                    const SolveReport rep = run_solver(m, bp.problem, cfg, bp.x0_seed);
                    total += rep.wall_time.count();
                    if (r == 0) {
                        rec.iterations = rep.iterations;
                        rec.status = rep.status;
                    }
                }
                rec.mean_time = total / static_cast<double>(opts.repeats);
            } catch (const std::exception& e) {
                rec.status.reset();
                rec.error = e.what();
                rec.iterations = cfg.max_iter;
                rec.mean_time = total / static_cast<double>(opts.repeats);
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

ProfileTable performance_ratios(const std::vector<BenchRecord>& records, Measure measure,
                                double r_max) {
    if (!(r_max > 1.0)) throw ConfigError("performance_ratios: r_max must exceed 1");
    ProfileTable t;
    t.r_max = r_max;
    std::map<std::string, std::size_t> ppos, spos;
    for (const BenchRecord& r : records) {
        index_of(t.problem_ids, ppos, r.problem_id);
        index_of(t.solver_ids, spos, r.solver_id);
    }
    const std::size_t np = t.problem_ids.size(), ns = t.solver_ids.size();
    std::vector<std::vector<const BenchRecord*>> grid(np, std::vector<const BenchRecord*>(ns));
    for (const BenchRecord& r : records) {
        const BenchRecord*& cell = grid[ppos[r.problem_id]][spos[r.solver_id]];
        if (cell) {
            throw IncompleteGrid("duplicate record for (" + r.problem_id + ", " + r.solver_id + ")");
        }
        cell = &r;
    }
    t.ratios.assign(np, std::vector<double>(ns, r_max));
    t.converged.assign(np, std::vector<bool>(ns, false));
    for (std::size_t p = 0; p < np; ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < ns; ++s) {
            const BenchRecord* r = grid[p][s];
            if (!r) {
                throw IncompleteGrid("missing record for (" + t.problem_ids[p] + ", " +
                                     t.solver_ids[s] + ")");
            }
            if (r->converged()) {
                t.converged[p][s] = true;
                best = std::min(best, r->value(measure));
            }
        }
        for (std::size_t s = 0; s < ns; ++s) {
            if (!t.converged[p][s]) continue;
            const double v = grid[p][s]->value(measure);
            // Zero timings (clock granularity) tie with the winner.
            const double ratio = v == best ? 1.0 : (best > 0.0 ? v / best : r_max);
            t.ratios[p][s] = std::min(ratio, r_max);
        }
    }
    return t;
}

std::vector<double> linear_tau_grid(double r_max) {
    std::vector<double> g;
    for (long i = 10; i <= std::lround(r_max * 10.0); ++i) g.push_back(static_cast<double>(i) / 10.0);
    return g;
}

std::vector<double> log_tau_grid(double r_max, std::size_t points) {
    if (points < 2) return {1.0};
    std::vector<double> g(points);
    const double lr = std::log(r_max);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = std::exp(lr * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    g.front() = 1.0;
    g.back() = r_max;
    return g;
}

std::vector<std::pair<double, double>> profile_curve(const ProfileTable& table,
                                                     const std::string& solver_id,
                                                     const std::vector<double>& tau_grid) {
    if (tau_grid.empty() || tau_grid.front() != 1.0) {
        throw ConfigError("profile_curve: tau grid must start at 1");
    }
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end())) {
        throw ConfigError("profile_curve: tau grid must ascend");
    }
    const auto it = std::find(table.solver_ids.begin(), table.solver_ids.end(), solver_id);
    if (it == table.solver_ids.end()) throw ConfigError("profile_curve: unknown solver " + solver_id);
    const std::size_t s = static_cast<std::size_t>(it - table.solver_ids.begin());

    std::vector<double> col;
    for (const auto& row : table.ratios) col.push_back(row[s]);
    std::sort(col.begin(), col.end());
    const double np = static_cast<double>(col.size());

    std::vector<std::pair<double, double>> curve;
    curve.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        const auto count = std::upper_bound(col.begin(), col.end(), tau) - col.begin();
        curve.emplace_back(tau, col.empty() ? 0.0 : static_cast<double>(count) / np);
    }
    return curve;
}

std::vector<SolverSummary> efficiency_robustness(const ProfileTable& table) {
    std::vector<SolverSummary> out;
    const double np = static_cast<double>(table.problem_ids.size());
    for (std::size_t s = 0; s < table.solver_ids.size(); ++s) {
        std::size_t wins = 0, solved = 0;
        for (std::size_t p = 0; p < table.problem_ids.size(); ++p) {
            if (!table.converged[p][s]) continue;
            ++solved;
            if (table.ratios[p][s] == 1.0) ++wins;
        }
        SolverSummary sum{table.solver_ids[s], 0.0, 0.0};
        if (np > 0) {
            sum.efficiency = 100.0 * static_cast<double>(wins) / np;
            sum.robustness = 100.0 * static_cast<double>(solved) / np;
        }
        out.push_back(sum);
    }
    return out;
}

// ---------------------------------------------------------------------------

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "problem_id,solver_id,status,iterations,mean_time_s\n";
    for (const BenchRecord& r : records) {
        out << r.problem_id << ',' << r.solver_id << ','
            << (r.status ? to_string(*r.status) : std::string("Error")) << ',' << r.iterations
            << ',' << fmt_double(r.mean_time) << '\n';
    }
}

std::vector<BenchRecord> read_records_csv(std::istream& in, const std::string& source) {
    std::vector<BenchRecord> out;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 5) throw ParseError(source, lineno, "expected 5 fields");
        BenchRecord r;
        r.problem_id = f[0];
        r.solver_id = f[1];
        if (f[2] == "Error") {
            r.error = "recorded as Error";
        } else {
            try {
                r.status = parse_status(f[2]);
            } catch (const ConfigError& e) {
                throw ParseError(source, lineno, e.what());
            }
        }
        r.iterations = parse_count(f[3], source, lineno);
        r.mean_time = parse_double(f[4], source, lineno);
        out.push_back(std::move(r));
    }
    return out;
}

void write_ratio_csv(std::ostream& out, const ProfileTable& table) {
    out << "problem_id";
    for (const auto& s : table.solver_ids) out << ',' << s;
    out << '\n';
    for (std::size_t p = 0; p < table.problem_ids.size(); ++p) {
        out << table.problem_ids[p];
        for (double r : table.ratios[p]) out << ',' << fmt_double(r);
        out << '\n';
    }
}

ProfileTable read_ratio_csv(std::istream& in, double r_max, const std::string& source) {
    ProfileTable t;
    t.r_max = r_max;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
    auto header = split_csv(line);
    if (header.empty() || header[0] != "problem_id") {
        throw ParseError(source, 1, "header must start with problem_id");
    }
    t.solver_ids.assign(header.begin() + 1, header.end());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw ParseError(source, lineno, "wrong field count");
        t.problem_ids.push_back(f[0]);
        std::vector<double> row;
        std::vector<bool> conv;
        for (std::size_t i = 1; i < f.size(); ++i) {
            row.push_back(parse_double(f[i], source, lineno));
            conv.push_back(row.back() < r_max);
        }
        t.ratios.push_back(std::move(row));
        t.converged.push_back(std::move(conv));
    }
    return t;
}

void write_curves_csv(std::ostream& out, const ProfileTable& table,
                      const std::vector<double>& tau_grid) {
    out << "tau";
    for (const auto& s : table.solver_ids) out << ',' << s;
    out << '\n';
    std::vector<std::vector<std::pair<double, double>>> curves;
    for (const auto& s : table.solver_ids) curves.push_back(profile_curve(table, s, tau_grid));
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        out << fmt_double(tau_grid[i]);
        for (const auto& c : curves) out << ',' << fmt_double(c[i].second);
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SolverSummary>& summary) {
    out << "solver,efficiency_percent,robustness_percent\n";
    for (const auto& s : summary) {
        out << s.solver_id << ',' << fmt_double(s.efficiency) << ',' << fmt_double(s.robustness)
            << '\n';
    }
}

std::string bench_manifest_json(const std::vector<std::string>& problem_ids,
                                const std::vector<Method>& solvers, const SolverConfig& cfg,
                                const BenchOptions& opts, double r_max) {
    nlohmann::json j;
    j["problems"] = problem_ids;
    std::vector<std::string> names;
    for (Method m : solvers) names.push_back(to_string(m));
    j["solvers"] = names;
    j["repeats"] = opts.repeats;
    j["measure"] = to_string(opts.measure);
    j["r_max"] = r_max;
    auto& c = j["config"];
    c["gamma"] = cfg.gamma;
    c["delta"] = cfg.delta;
    c["epsilon"] = cfg.epsilon;
    c["max_iter"] = cfg.max_iter;
    c["omega"] = cfg.omega ? nlohmann::json(*cfg.omega) : nlohmann::json("auto");
    c["theta"] = cfg.theta ? nlohmann::json(*cfg.theta) : nlohmann::json("auto");
    c["nu"] = cfg.nu;
    c["alpha_schedule"] =
        cfg.alpha.kind == AlphaSchedule::Kind::Heuristic ? "heuristic" : "theoretical";
    c["k_max"] = cfg.alpha.k_max;
    if (std::isfinite(cfg.alpha.mu)) c["mu"] = cfg.alpha.mu;
    c["divergence_threshold"] = cfg.divergence_threshold;
    c["G"] = cfg.g.is_identity() ? nlohmann::json("identity") : nlohmann::json(cfg.g.entries());
    return j.dump(2) + "\n";
}

}  // namespace ave
