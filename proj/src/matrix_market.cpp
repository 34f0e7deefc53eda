#include "ave/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "ave/errors.hpp"

namespace ave {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double parse_double(const std::string& tok, const std::string& source, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(source, line, "invalid number '" + tok + "'");
    }
    return v;
}

std::size_t parse_index(const std::string& tok, const std::string& source, std::size_t line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(source, line, "invalid integer '" + tok + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

Matrix read_matrix_market(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(source, 1, "empty Matrix Market file");
    ++lineno;
    const auto head = tokens(lower(line));
    if (head.size() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix") {
        throw ParseError(source, lineno, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
    }
    const std::string& format = head[2];
    const std::string& field = head[3];
    const std::string& symmetry = head[4];
    if (format != "coordinate" && format != "array") {
        throw ParseError(source, lineno, "unsupported format '" + format + "'");
    }
    if (field != "real" && field != "integer" && field != "double" &&
        !(field == "pattern" && format == "coordinate")) {
        throw ParseError(source, lineno, "unsupported field '" + field + "'");
    }
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
        throw ParseError(source, lineno, "unsupported symmetry '" + symmetry + "'");
    }

    // Size line, skipping comments.
    std::vector<std::string> size_tok;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        size_tok = tokens(line);
        if (!size_tok.empty()) break;
    }
    const std::size_t expected = format == "coordinate" ? 3 : 2;
    if (size_tok.size() != expected) {
        throw ParseError(source, lineno, "malformed size line");
    }
    const std::size_t rows = parse_index(size_tok[0], source, lineno);
    const std::size_t cols = parse_index(size_tok[1], source, lineno);
    const double sign = symmetry == "skew-symmetric" ? -1.0 : 1.0;
    const bool mirrored = symmetry != "general";

    if (format == "array") {
        DenseMatrix a(rows, cols);
        std::size_t count = 0;
        const std::size_t total = rows * cols;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '%') continue;
            for (const auto& t : tokens(line)) {
                if (count >= total) throw ParseError(source, lineno, "too many array entries");
                const double v = parse_double(t, source, lineno);
                a(count % rows, count / rows) = v;
                ++count;
            }
        }
        if (mirrored) throw ParseError(source, lineno, "symmetric array storage is not supported");
        if (count != total) throw ParseError(source, lineno, "too few array entries");
        return a;
    }

    const std::size_t nnz = parse_index(size_tok[2], source, lineno);
    std::vector<Triplet> t;
    t.reserve(mirrored ? 2 * nnz : nnz);
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        const auto tok = tokens(line);
        if (tok.empty()) continue;
        const std::size_t want = field == "pattern" ? 2 : 3;
        if (tok.size() != want) throw ParseError(source, lineno, "malformed entry line");
        const std::size_t i = parse_index(tok[0], source, lineno);
        const std::size_t j = parse_index(tok[1], source, lineno);
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw ParseError(source, lineno, "entry index out of range");
        }
        const double v = field == "pattern" ? 1.0 : parse_double(tok[2], source, lineno);
        t.push_back({i - 1, j - 1, v});
        if (mirrored && i != j) t.push_back({j - 1, i - 1, sign * v});
        if (++seen > nnz) throw ParseError(source, lineno, "more entries than declared");
    }
    if (seen != nnz) {
        throw ParseError(source, lineno, "declared " + std::to_string(nnz) + " entries, found " +
                                             std::to_string(seen));
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

Matrix read_matrix_market(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_matrix_market(in, path.string());
}

void write_matrix_market(std::ostream& out, const Matrix& a) {
    const SparseMatrix s = a.sparse() ? *a.sparse() : SparseMatrix::from_dense(*a.dense());
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << s.rows() << ' ' << s.cols() << ' ' << s.nnz() << '\n';
    for (const auto& t : s.triplets()) {
        out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << format_double(t.value) << '\n';
    }
    if (!out) throw IoError("write_matrix_market: stream failure");
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& a) {
    auto out = open_out(path);
    write_matrix_market(out, a);
}

Vector read_vector(std::istream& in, const std::string& source) {
    Vector v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line[0] == '%') continue;
        for (const auto& t : tokens(line)) v.push_back(parse_double(t, source, lineno));
    }
    return v;
}

Vector read_vector(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_vector(in, path.string());
}

void write_vector(std::ostream& out, const Vector& v) {
    for (double x : v) out << format_double(x) << '\n';
    if (!out) throw IoError("write_vector: stream failure");
}

void write_vector(const std::filesystem::path& path, const Vector& v) {
    auto out = open_out(path);
    write_vector(out, v);
}

DenseMatrix read_dense_csv(std::istream& in, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        for (const auto& t : tokens(line)) row.push_back(parse_double(t, source, lineno));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(source, lineno, "row length differs from the first row");
        }
        rows.push_back(std::move(row));
    }
    return DenseMatrix::from_rows(rows);
}

void write_dense_csv(std::ostream& out, const DenseMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) out << ',';
            out << format_double(a(i, j));
        }
        out << '\n';
    }
}

}  // namespace ave
