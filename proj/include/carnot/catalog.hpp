#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

// ---------------------------------------------------------------------------
// Built-in groups
// ---------------------------------------------------------------------------

inline StratifiedAlgebra make_abelian(int n) {
    if (n < 1) throw semantic_error("abelian group needs dimension >= 1");
    return StratifiedAlgebra("r" + std::to_string(n), {n}, {});
}

/// Heisenberg group of n pairs: dim 2n+1, layers (2n, 1),
/// [X_i, X_{n+i}] = X_{2n+1}.
inline StratifiedAlgebra make_heisenberg(int n) {
    if (n < 1) throw semantic_error("heisenberg index must be >= 1");
    std::vector<StructureEntry> br;
    for (int i = 1; i <= n; ++i) br.push_back({i, n + i, 2 * n + 1, Rational(1)});
    return StratifiedAlgebra("h" + std::to_string(n), {2 * n, 1}, br);
}

/// Engel group: layers (2,1,1), [X1,X2] = X3, [X1,X3] = X4.
inline StratifiedAlgebra make_engel() {
    return StratifiedAlgebra("engel", {2, 1, 1},
                             {{1, 2, 3, Rational(1)}, {1, 3, 4, Rational(1)}});
}

/// Free step-2 group on 3 generators: layers (3,3),
/// [X1,X2] = X4, [X1,X3] = X5, [X2,X3] = X6.
inline StratifiedAlgebra make_free_step2_3() {
    return StratifiedAlgebra(
        "f23", {3, 3},
        {{1, 2, 4, Rational(1)}, {1, 3, 5, Rational(1)}, {2, 3, 6, Rational(1)}});
}

/// Filiform step-4 group: layers (2,1,1,1), [X1,X2] = X3, [X1,X3] = X4,
/// [X1,X4] = X5. Exercises the fourth-order product term.
inline StratifiedAlgebra make_filiform_step4() {
    return StratifiedAlgebra(
        "filiform4", {2, 1, 1, 1},
        {{1, 2, 3, Rational(1)}, {1, 3, 4, Rational(1)}, {1, 4, 5, Rational(1)}});
}

// ---------------------------------------------------------------------------
// Group definition files
// ---------------------------------------------------------------------------

/// Parsed group file: the algebra plus optional subgroup rows for a splitting.
struct GroupFile {
    StratifiedAlgebra algebra;
    std::vector<std::vector<Rational>> w_rows, l_rows;
    bool has_splitting() const { return !w_rows.empty() && !l_rows.empty(); }
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

inline std::vector<std::vector<Rational>> parse_subgroup_rows(const std::string& rhs, int line_no) {
    std::vector<std::vector<Rational>> rows;
    std::string rowtext;
    std::istringstream in(rhs);
    auto flush = [&](const std::string& text) {
        const auto toks = tokenize(text);
        if (toks.empty()) return;
        std::vector<Rational> row;
        for (const auto& t : toks) row.push_back(parse_rational(t));
        rows.push_back(std::move(row));
    };
    std::string piece;
    while (std::getline(in, piece, ';')) flush(piece);
    if (rows.empty())
        throw parse_error("line " + std::to_string(line_no) + ": subgroup needs at least one row");
    return rows;
}

} // namespace detail

/// Text format, one statement per line ('#' starts a comment):
///   name <identifier>
///   layer_dims <d1> <d2> ...
///   bracket <i> <j> <k> <num[/den]>     (antisymmetric closure applied)
///   subgroup W = <row> ; <row> ; ...    (rational row vectors)
///   subgroup L = <row> ; <row> ; ...
inline GroupFile parse_group_file(std::istream& in) {
    std::string name = "unnamed";
    std::vector<int> layer_dims;
    std::vector<StructureEntry> brackets;
    std::vector<std::vector<Rational>> w_rows, l_rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto toks = detail::tokenize(line);
        if (toks.empty()) continue;
        const std::string key = toks[0];
        try {
            if (key == "name") {
                if (toks.size() != 2) throw parse_error("'name' takes one token");
                name = toks[1];
            } else if (key == "layer_dims") {
                if (toks.size() < 2) throw parse_error("'layer_dims' needs at least one dimension");
                layer_dims.clear();
                for (std::size_t i = 1; i < toks.size(); ++i) layer_dims.push_back(std::stoi(toks[i]));
            } else if (key == "bracket") {
                if (toks.size() != 5) throw parse_error("'bracket' needs: i j k value");
                brackets.push_back({std::stoi(toks[1]), std::stoi(toks[2]), std::stoi(toks[3]),
                                    parse_rational(toks[4])});
            } else if (key == "subgroup") {
                if (toks.size() < 4 || (toks[1] != "W" && toks[1] != "L") || toks[2] != "=")
                    throw parse_error("'subgroup' needs: subgroup W|L = rows");
                const auto eq = line.find('=');
                auto rows = detail::parse_subgroup_rows(line.substr(eq + 1), line_no);
                (toks[1] == "W" ? w_rows : l_rows) = std::move(rows);
            } else {
                throw parse_error("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw parse_error("line " + std::to_string(line_no) + ": malformed number");
        } catch (const parse_error& e) {
            throw parse_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (layer_dims.empty()) throw parse_error("group file is missing 'layer_dims'");
    GroupFile gf{StratifiedAlgebra(name, layer_dims, brackets), std::move(w_rows),
                 std::move(l_rows)};
    const int n = gf.algebra.dim();
    for (const auto& rows : {&gf.w_rows, &gf.l_rows})
        for (const auto& r : *rows)
            if (static_cast<int>(r.size()) != n)
                throw parse_error("subgroup row length does not match the group dimension");
    return gf;
}

inline GroupFile load_group_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open group file '" + path + "'");
    try {
        return parse_group_file(in);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

/// Default catalog directory: $CARNOT_CATALOG if set, else "catalog".
inline std::string default_catalog_dir() {
    if (const char* env = std::getenv("CARNOT_CATALOG")) return env;
    return "catalog";
}

/// Resolve a group reference: as given, then relative to `base_dir`, then in
/// the catalog directory.
inline std::string resolve_group_path(const std::string& name, const std::string& base_dir = "",
                                      const std::string& catalog_dir = default_catalog_dir()) {
    namespace fs = std::filesystem;
    if (fs::exists(name)) return name;
    if (!base_dir.empty() && fs::exists(fs::path(base_dir) / name))
        return (fs::path(base_dir) / name).string();
    if (fs::exists(fs::path(catalog_dir) / name)) return (fs::path(catalog_dir) / name).string();
    throw parse_error("group file '" + name + "' not found (searched ., " +
                      (base_dir.empty() ? "" : base_dir + ", ") + catalog_dir + ")");
}

} // namespace carnot
