#pragma once

#include <filesystem>

#include "ave/generators.hpp"

namespace ave {

/// A problem directory: manifest.json, A.mtx, b.txt and (when known) xstar.txt.
void save_problem(const std::filesystem::path& dir, const AveProblem& p, const Manifest& m);

struct LoadedProblem {
    AveProblem problem;
    Manifest manifest;
};

/// Reads a bundle written by save_problem. A missing manifest is allowed
/// (family "custom"); spectral info is restored from the manifest when present.
LoadedProblem load_problem(const std::filesystem::path& dir);

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

}  // namespace ave
