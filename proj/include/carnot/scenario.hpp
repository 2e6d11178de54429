#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/catalog.hpp"
#include "carnot/graph.hpp"
#include "carnot/polynomial.hpp"
#include "carnot/splitting.hpp"

namespace carnot {

/// A fully resolved scenario: group, splitting, graph function and the
/// command parameters. Owns the algebra and splitting through stable pointers
/// so the contained points and graph functions stay valid across moves.
struct Scenario {
    std::string name = "scenario";
    std::string group_path;
    std::shared_ptr<const StratifiedAlgebra> algebra;
    std::unique_ptr<const Splitting> splitting;
    std::unique_ptr<const GraphFunction> phi;
    std::optional<BoxDomain> domain;
    std::optional<std::vector<double>> base_point; // W-coordinates
    std::optional<BoxDomain::Box> v_box;           // W-coordinate box
    std::uint64_t seed = 1;
    double tol = 1e-4;
    std::optional<std::pair<double, double>> ladder; // t_first, t_last

    Point base_w_point() const {
        if (!base_point) throw semantic_error("scenario has no base point");
        if (!splitting) throw semantic_error("scenario has no splitting");
        return splitting->embed_w(*base_point);
    }
};

namespace detail {

inline std::pair<double, double> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw parse_error("range must look like lo..hi");
    try {
        const double lo = std::stod(text.substr(0, dots));
        const double hi = std::stod(text.substr(dots + 2));
        return {lo, hi};
    } catch (const std::exception&) {
        throw parse_error("malformed range '" + text + "'");
    }
}

/// "a..b, c..d" -> one box
inline BoxDomain::Box parse_box(const std::string& text) {
    BoxDomain::Box box;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        // trim
        const auto b = piece.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = piece.find_last_not_of(" \t");
        const auto [lo, hi] = parse_range(piece.substr(b, e - b + 1));
        box.lo.push_back(lo);
        box.hi.push_back(hi);
    }
    if (box.lo.empty()) throw parse_error("empty box specification");
    return box;
}

inline std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string t;
    while (in >> t) {
        try {
            out.push_back(std::stod(t));
        } catch (const std::exception&) {
            throw parse_error("malformed number '" + t + "'");
        }
    }
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// Scenario text format, one statement per line ('#' comments):
///   group <file>                      resolved next to the scenario, then in the catalog
///   phi poly: l<k> = <polynomial in w1..wN>
///   phi linear: <theta rows, ';' separated>   first-layer component matrix
///   phi constant: <L graded coordinates>
///   domain box: lo..hi[, lo..hi ...]          repeated lines form a union
///   base point: <W coordinates>
///   box V: lo..hi[, lo..hi ...]
///   seed <u64> | tol <float> | ladder <t_first> <t_last> | name <id>
inline Scenario load_scenario(const std::string& path,
                              const std::string& catalog_dir = default_catalog_dir()) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open scenario file '" + path + "'");
    const std::string base_dir = std::filesystem::path(path).parent_path().string();

    Scenario sc;
    std::vector<std::pair<int, std::string>> poly_lines; // (L coord 1-based, expr)
    std::optional<std::string> linear_text;
    std::optional<std::vector<double>> constant_coords;
    std::vector<BoxDomain::Box> domain_boxes;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw parse_error(path + ":" + std::to_string(line_no) + ": " + msg);
        };
        try {
            if (t.rfind("group", 0) == 0 && t.size() > 5) {
                sc.group_path = detail::trim(t.substr(5));
            } else if (t.rfind("phi poly:", 0) == 0) {
                const std::string rhs = detail::trim(t.substr(9));
                const auto eq = rhs.find('=');
                if (eq == std::string::npos || rhs.empty() || rhs[0] != 'l')
                    fail("phi poly needs 'l<k> = <expr>'");
                const int k = std::stoi(detail::trim(rhs.substr(1, eq - 1)));
                poly_lines.emplace_back(k, detail::trim(rhs.substr(eq + 1)));
            } else if (t.rfind("phi linear:", 0) == 0) {
                linear_text = detail::trim(t.substr(11));
            } else if (t.rfind("phi constant:", 0) == 0) {
                constant_coords = detail::parse_doubles(t.substr(13));
            } else if (t.rfind("domain box:", 0) == 0) {
                domain_boxes.push_back(detail::parse_box(t.substr(11)));
            } else if (t.rfind("base point:", 0) == 0) {
                sc.base_point = detail::parse_doubles(t.substr(11));
            } else if (t.rfind("box V:", 0) == 0) {
                sc.v_box = detail::parse_box(t.substr(6));
            } else if (t.rfind("seed", 0) == 0) {
                sc.seed = std::stoull(detail::trim(t.substr(4)));
            } else if (t.rfind("tol", 0) == 0) {
                sc.tol = std::stod(detail::trim(t.substr(3)));
            } else if (t.rfind("ladder", 0) == 0) {
                const auto v = detail::parse_doubles(t.substr(6));
                if (v.size() != 2) fail("ladder needs two scales: t_first t_last");
                sc.ladder = {v[0], v[1]};
            } else if (t.rfind("name", 0) == 0) {
                sc.name = detail::trim(t.substr(4));
            } else {
                fail("unknown statement '" + t + "'");
            }
        } catch (const parse_error&) {
            throw;
        } catch (const std::exception& e) {
            fail(std::string("malformed value (") + e.what() + ")");
        }
    }

    if (sc.group_path.empty()) throw parse_error(path + ": scenario is missing 'group'");
    const std::string resolved = resolve_group_path(sc.group_path, base_dir, catalog_dir);
    GroupFile gf = load_group_file(resolved);
    sc.algebra = std::make_shared<const StratifiedAlgebra>(std::move(gf.algebra));

    const auto rep = validate_algebra(*sc.algebra);
    if (!rep.ok()) {
        std::string msg = "group '" + sc.algebra->name() + "' fails validation:";
        for (const auto& v : rep.violations) msg += std::string(" ") + axiom_name(v.kind);
        throw semantic_error(msg);
    }

    if (gf.has_splitting()) {
        sc.splitting = std::make_unique<const Splitting>(*sc.algebra, Subspace(*sc.algebra, gf.w_rows),
                                                         Subspace(*sc.algebra, gf.l_rows));
    } else if (!gf.w_rows.empty() || !gf.l_rows.empty()) {
        throw semantic_error("group file declares only one of the two subgroups");
    }

    if (!domain_boxes.empty()) sc.domain = BoxDomain(std::move(domain_boxes));

    const bool wants_phi = !poly_lines.empty() || linear_text || constant_coords;
    if (wants_phi || sc.domain) {
        if (!sc.splitting) throw semantic_error("scenario defines a function but no splitting");
        if (!sc.domain) throw semantic_error("scenario defines a function but no domain box");
        const Splitting& s = *sc.splitting;
        if ((poly_lines.empty() ? 0 : 1) + (linear_text ? 1 : 0) + (constant_coords ? 1 : 0) > 1)
            throw semantic_error("scenario mixes phi poly / linear / constant rules");
        if (!poly_lines.empty()) {
            std::vector<Polynomial> rules(s.l_space().dim(),
                                          Polynomial::constant(s.topological_dim_w(), 0.0));
            for (const auto& [k, expr] : poly_lines) {
                if (k < 1 || k > s.l_space().dim())
                    throw semantic_error("phi poly: L coordinate index out of range");
                rules[k - 1] = Polynomial::parse(expr, s.topological_dim_w());
            }
            sc.phi = std::make_unique<const GraphFunction>(
                GraphFunction::poly(s, *sc.domain, std::move(rules)));
        } else if (linear_text) {
            std::vector<std::vector<double>> theta_rows;
            std::istringstream ts(*linear_text);
            std::string piece;
            while (std::getline(ts, piece, ';')) {
                auto vals = detail::parse_doubles(piece);
                if (!vals.empty()) theta_rows.push_back(std::move(vals));
            }
            Mat<double> theta(theta_rows.size(), theta_rows.empty() ? 0 : theta_rows[0].size());
            for (std::size_t i = 0; i < theta_rows.size(); ++i) {
                if (theta_rows[i].size() != theta.cols())
                    throw semantic_error("phi linear: ragged matrix rows");
                for (std::size_t j = 0; j < theta.cols(); ++j) theta(i, j) = theta_rows[i][j];
            }
            sc.phi = std::make_unique<const GraphFunction>(GraphFunction::intrinsic_linear(
                s, *sc.domain, IntrinsicLinearMap::from_first_layer(s, theta)));
        } else if (constant_coords) {
            if (static_cast<int>(constant_coords->size()) != s.l_space().dim())
                throw semantic_error("phi constant: need one value per L coordinate");
            sc.phi = std::make_unique<const GraphFunction>(
                GraphFunction::constant(s, *sc.domain, s.embed_l(*constant_coords)));
        } else {
            // no rule: identity graph (phi == e)
            sc.phi = std::make_unique<const GraphFunction>(GraphFunction::constant(
                s, *sc.domain, identity<double>(*sc.algebra)));
        }
    }

    if (sc.base_point) {
        if (!sc.splitting) throw semantic_error("base point given without a splitting");
        if (static_cast<int>(sc.base_point->size()) != sc.splitting->topological_dim_w())
            throw semantic_error("base point arity does not match dim W");
        if (sc.domain && !sc.domain->contains(*sc.base_point))
            throw semantic_error("base point lies outside the domain");
    }
    if (sc.v_box) {
        if (!sc.domain) throw semantic_error("box V given without a domain");
        if (sc.v_box->lo.size() != static_cast<std::size_t>(sc.domain->dim()))
            throw semantic_error("box V arity does not match dim W");
        if (!sc.domain->contains(sc.v_box->lo) || !sc.domain->contains(sc.v_box->hi))
            throw semantic_error("box V is not contained in the domain");
    }
    return sc;
}

} // namespace carnot
