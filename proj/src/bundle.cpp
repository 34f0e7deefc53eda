#include "ave/bundle.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ave/errors.hpp"
#include "ave/matrix_market.hpp"

namespace ave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
std::optional<T> get(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
    json j;
    j["family"] = m.family;
    j["n"] = m.n;
    put(j, "density_requested", m.density_requested);
    j["density_achieved"] = m.density_achieved;
    put(j, "sigma_min_target", m.sigma_min_target);
    put(j, "margin", m.margin);
    put(j, "sigma_min_achieved", m.sigma_min_achieved);
    put(j, "sigma_max", m.sigma_max);
    put(j, "scale_factor", m.scale_factor);
    j["seed"] = m.seed;
    j["prng"] = m.generator;
    return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("manifest.json", 0, e.what());
    }
    Manifest m;
    try {
        m.family = j.value("family", std::string("custom"));
        m.n = j.value("n", std::size_t{0});
        m.density_requested = get<double>(j, "density_requested");
        m.density_achieved = j.value("density_achieved", 0.0);
        m.sigma_min_target = get<double>(j, "sigma_min_target");
        m.margin = get<double>(j, "margin");
        m.sigma_min_achieved = get<double>(j, "sigma_min_achieved");
        m.sigma_max = get<double>(j, "sigma_max");
        m.scale_factor = get<double>(j, "scale_factor");
        m.seed = j.value("seed", std::uint64_t{0});
        m.generator = j.value("prng", std::string());
    } catch (const json::exception& e) {
        throw ParseError("manifest.json", 0, e.what());
    }
    return m;
}

void save_problem(const fs::path& dir, const AveProblem& p, const Manifest& m) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    write_matrix_market(dir / "A.mtx", p.a);
    write_vector(dir / "b.txt", p.b);
    if (p.known_solution) write_vector(dir / "xstar.txt", *p.known_solution);
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << manifest_to_json(m);
}

LoadedProblem load_problem(const fs::path& dir) {
    LoadedProblem lp;
    Matrix a = read_matrix_market(dir / "A.mtx");
    Vector b = read_vector(dir / "b.txt");
    std::optional<Vector> xstar;
    if (fs::exists(dir / "xstar.txt")) xstar = read_vector(dir / "xstar.txt");

    if (fs::exists(dir / "manifest.json")) {
        std::ifstream in(dir / "manifest.json");
        std::stringstream ss;
        ss << in.rdbuf();
        lp.manifest = manifest_from_json(ss.str());
    } else {
        lp.manifest.family = "custom";
        lp.manifest.n = b.size();
    }
    lp.problem = make_problem(std::move(a), std::move(b), std::move(xstar));
    if (lp.manifest.sigma_min_achieved && lp.manifest.sigma_max) {
        lp.problem.spectral = SpectralInfo{*lp.manifest.sigma_min_achieved, *lp.manifest.sigma_max};
    }
    return lp;
}

}  // namespace ave
