#include "ave/generators.hpp"

#include <cmath>
#include <numbers>

#include "ave/errors.hpp"
#include "ave/lu.hpp"
#include "ave/spectral.hpp"

namespace ave {

namespace rng {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, Stream tag) {
    return std::mt19937_64(splitmix64(seed ^ static_cast<std::uint64_t>(tag)));
}

double uniform_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace rng

namespace {

constexpr const char* kGeneratorId = "mt19937_64/splitmix64-streams v1";

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::Tridiag8: return "tridiag8";
        case Family::RandomSparse: return "random";
        case Family::NoSolution1D: return "nosol1d";
        case Family::Custom: return "custom";
    }
    return "?";
}

Family parse_family(const std::string& s) {
    if (s == "tridiag8") return Family::Tridiag8;
    if (s == "random" || s == "random-sparse") return Family::RandomSparse;
    if (s == "nosol1d" || s == "no-solution-1d") return Family::NoSolution1D;
    if (s == "custom") return Family::Custom;
    throw ConfigError("unknown problem family '" + s + "'");
}

GeneratedProblem gen_tridiag8(std::size_t n) {
    if (n < 2 || n % 2 != 0) throw ConfigError("gen_tridiag8: n must be even and >= 2");
    SparseMatrix a = SparseMatrix::tridiagonal(n, -1.0, 8.0, -1.0);
    Vector xstar(n);
    for (std::size_t i = 0; i < n; ++i) xstar[i] = i % 2 == 0 ? -1.0 : 1.0;
    Vector b = matvec(a, xstar);
    for (std::size_t i = 0; i < n; ++i) b[i] -= std::abs(xstar[i]);

    GeneratedProblem g{make_problem(std::move(a), std::move(b), std::move(xstar)), {}};
    // Symmetric Toeplitz tridiagonal: eigenvalues 8 - 2 cos(k pi / (n + 1)).
    const double c = std::cos(std::numbers::pi / static_cast<double>(n + 1));
    g.problem.spectral = SpectralInfo{8.0 - 2.0 * c, 8.0 + 2.0 * c};
    g.manifest.family = "tridiag8";
    g.manifest.n = n;
    g.manifest.density_achieved = static_cast<double>(3 * n - 2) / (static_cast<double>(n) * n);
    g.manifest.sigma_min_achieved = g.problem.spectral->sigma_min;
    g.manifest.sigma_max = g.problem.spectral->sigma_max;
    g.manifest.generator = kGeneratorId;
    return g;
}

GeneratedProblem gen_random_sparse(const RandomSparseParams& prm, std::uint64_t seed) {
    const std::size_t n = prm.n;
    if (n < 1) throw ConfigError("gen_random_sparse: n must be >= 1");
    if (!(prm.density > 0.0 && prm.density <= 1.0)) {
        throw ConfigError("gen_random_sparse: density must lie in (0, 1]");
    }
    if (!(prm.sigma_min_target > 0.0)) throw ConfigError("gen_random_sparse: sigma_min_target <= 0");
    if (!(prm.margin >= 0.0)) throw ConfigError("gen_random_sparse: margin < 0");

    const double nn = static_cast<double>(n);
    // Off-diagonal inclusion probability so that nnz ~= density * n^2 with a full diagonal.
    double q = n > 1 ? (prm.density * nn * nn - nn) / (nn * nn - nn) : 0.0;
    q = std::clamp(q, 0.0, 1.0);

    for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
        const std::uint64_t s = attempt == 0 ? seed : rng::splitmix64(seed + attempt);
        auto pattern = rng::stream(s, rng::Stream::Pattern);
        auto values = rng::stream(s, rng::Stream::Values);

        std::vector<Triplet> t;
        t.reserve(static_cast<std::size_t>(prm.density * nn * nn) + n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    t.push_back({i, j, 0.5 + rng::uniform_open(values)});
                } else if (rng::uniform_open(pattern) < q) {
                    t.push_back({i, j, 2.0 * rng::uniform_open(values) - 1.0});
                }
            }
        }
        SparseMatrix raw = SparseMatrix::from_triplets(n, n, std::move(t));

        double sigma_raw = 0.0;
        try {
            sigma_raw = sigma_min_estimate(lu_factor(raw.to_dense()));
        } catch (const SingularMatrix&) {
            continue;
        }
        if (!(sigma_raw > 1e-12 * raw.max_abs())) continue;

        const double sigma = prm.sigma_min_target * (1.0 + prm.margin);
        const double c = sigma / sigma_raw;
        const double raw_norm = matrix_norm2_estimate(Matrix(raw), SpectralOptions{1e-10, 200000});
        Matrix a = Matrix(std::move(raw)).scaled(c);

        auto sol = rng::stream(s, rng::Stream::Solution);
        Vector xstar(n);
        for (double& v : xstar) v = -100.0 + 200.0 * rng::uniform_open(sol);
        Vector b = matvec(a, xstar);
        for (std::size_t i = 0; i < n; ++i) b[i] -= std::abs(xstar[i]);

        GeneratedProblem g;
        g.manifest.family = "random";
        g.manifest.n = n;
        g.manifest.density_requested = prm.density;
        g.manifest.density_achieved = static_cast<double>(a.nnz()) / (nn * nn);
        g.manifest.sigma_min_target = prm.sigma_min_target;
        g.manifest.margin = prm.margin;
        g.manifest.sigma_min_achieved = sigma;
        g.manifest.sigma_max = c * raw_norm;
        g.manifest.scale_factor = c;
        g.manifest.seed = seed;
        g.manifest.generator = kGeneratorId;
        g.problem = make_problem(std::move(a), std::move(b), std::move(xstar));
        g.problem.spectral = SpectralInfo{sigma, c * raw_norm};
        return g;
    }
    throw GeneratorFailure("gen_random_sparse: numerically singular draw after 10 attempts");
}

GeneratedProblem gen_no_solution_1d() {
    GeneratedProblem g;
    g.problem = make_problem(DenseMatrix::identity(1), Vector{1.0});
    g.problem.spectral = SpectralInfo{1.0, 1.0};
    g.manifest.family = "nosol1d";
    g.manifest.n = 1;
    g.manifest.density_achieved = 1.0;
    g.manifest.sigma_min_achieved = 1.0;
    g.manifest.sigma_max = 1.0;
    g.manifest.generator = kGeneratorId;
    return g;
}

GeneratedProblem generate(const GeneratorSpec& spec) {
    switch (spec.family) {
        case Family::Tridiag8: return gen_tridiag8(spec.n);
        case Family::RandomSparse: return gen_random_sparse(spec.random, spec.seed);
        case Family::NoSolution1D: return gen_no_solution_1d();
        case Family::Custom: break;
    }
    throw ConfigError("generate: custom problems are loaded, not generated");
}

Vector gen_x0(std::size_t n, std::uint64_t seed) {
    auto gen = rng::stream(seed, rng::Stream::Start);
    Vector x(n);
    for (double& v : x) v = -100.0 + 200.0 * rng::uniform_open(gen);
    return x;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return rng::splitmix64(rng::splitmix64(master) + index);
}

}  // namespace ave
