#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "ave/problem.hpp"

namespace ave {

/// Reproducible random numbers.
///
/// Every stream is a std::mt19937_64 (whose output sequence is fixed by the
/// C++ standard) seeded with splitmix64(master_seed ^ stream_tag). Uniform
/// doubles are ((draw >> 11) + 0.5) * 2^-53, which lies strictly inside (0, 1).
/// Stream tags: pattern = 1, values = 2, solution = 3, start vector = 4; a
/// redraw attempt r > 0 uses master seed splitmix64(seed + r).
namespace rng {

enum class Stream : std::uint64_t { Pattern = 1, Values = 2, Solution = 3, Start = 4 };

std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 stream(std::uint64_t seed, Stream tag);
double uniform_open(std::mt19937_64& gen);

}  // namespace rng

struct RandomSparseParams {
    std::size_t n = 200;
    double density = 0.1;
    double sigma_min_target = 1.0;
    double margin = 0.05;
};

enum class Family { Tridiag8, RandomSparse, NoSolution1D, Custom };

std::string to_string(Family f);
Family parse_family(const std::string& s);

struct GeneratorSpec {
    Family family = Family::RandomSparse;
    RandomSparseParams random;
    std::size_t n = 0;  // Tridiag8 size
    std::uint64_t seed = 0;
};

/// Metadata stored next to a problem bundle.
struct Manifest {
    std::string family;
    std::size_t n = 0;
    std::optional<double> density_requested;
    double density_achieved = 0.0;
    std::optional<double> sigma_min_target;
    std::optional<double> margin;
    std::optional<double> sigma_min_achieved;
    std::optional<double> sigma_max;
    std::optional<double> scale_factor;
    std::uint64_t seed = 0;
    std::string generator;
};

struct GeneratedProblem {
    AveProblem problem;
    Manifest manifest;
};

/// A = tridiag(-1, 8, -1), x* = (-1, 1, ..., -1, 1), b = A x* - |x*|.
/// Requires even n >= 2.
GeneratedProblem gen_tridiag8(std::size_t n);

/// Sparse A with entries uniform on (-1, 1) off a positive diagonal drawn
/// from (0.5, 1.5), rescaled so sigma_min(A) = target (1 + margin); then
/// x* = -100 + 200 rand(n), b = A x* - |x*|.
GeneratedProblem gen_random_sparse(const RandomSparseParams& params, std::uint64_t seed);

/// x - |x| - 1 = 0, which has no solution.
GeneratedProblem gen_no_solution_1d();

GeneratedProblem generate(const GeneratorSpec& spec);

/// x^0 = -100 + 200 rand(n), entries strictly inside (-100, 100).
Vector gen_x0(std::size_t n, std::uint64_t seed);

/// Master-seed expansion for batches: the i-th problem's seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace ave
