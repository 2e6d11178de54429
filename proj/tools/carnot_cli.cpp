// carnot: command-line front end for the stratified-group calculus library.
//
// Exit codes: 0 success, 1 verification failure (a mathematical check failed
// beyond tolerance), 2 invalid scenario semantics, 64 parse/usage errors.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "carnot/carnot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitSemantic = 2;
constexpr int kExitUsage = 64;

struct GlobalOpts {
    std::string out_path;
    std::string catalog_dir = carnot::default_catalog_dir();
};

void emit(const GlobalOpts& g, const carnot::Report& rep) {
    if (g.out_path.empty()) {
        rep.write(std::cout);
        return;
    }
    std::ofstream out(g.out_path);
    if (!out) throw carnot::parse_error("cannot open output file '" + g.out_path + "'");
    rep.write(out);
}

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

carnot::ScaleLadder ladder_from(const carnot::Scenario& sc, double t_first, double t_last) {
    if (t_first > 0 && t_last > 0) return carnot::ScaleLadder::geometric(t_first, t_last);
    if (sc.ladder) return carnot::ScaleLadder::geometric(sc.ladder->first, sc.ladder->second);
    return carnot::ScaleLadder::geometric();
}

int cmd_catalog(const GlobalOpts& g) {
    carnot::Report rep;
    rep.kv("command", "catalog");
    rep.kv("catalog_dir", g.catalog_dir);
    namespace fs = std::filesystem;
    if (!fs::is_directory(g.catalog_dir))
        throw carnot::parse_error("catalog directory '" + g.catalog_dir + "' not found");
    rep.section("groups", {"name", "file", "dim", "step", "Q", "splitting"});
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(g.catalog_dir))
        if (e.path().extension() == ".grp") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            const auto gf = carnot::load_group_file(f.string());
            rep.row({gf.algebra.name(), f.filename().string(),
                     std::to_string(gf.algebra.dim()), std::to_string(gf.algebra.step()),
                     std::to_string(gf.algebra.homogeneous_dimension()),
                     gf.has_splitting() ? "yes" : "no"});
        } catch (const std::exception& e) {
            rep.row({f.filename().string(), "unreadable", e.what()});
        }
    }
    emit(g, rep);
    return kExitOk;
}

int cmd_validate(const GlobalOpts& g, const std::string& scenario_path) {
    carnot::Report rep;
    rep.kv("command", "validate");
    rep.kv("scenario", scenario_path);
    const auto sc = carnot::load_scenario(scenario_path, g.catalog_dir);
    rep.kv("group", sc.algebra->name());
    rep.kv("dim", sc.algebra->dim());
    rep.kv("step", sc.algebra->step());
    rep.kv("homogeneous_dim", sc.algebra->homogeneous_dimension());
    rep.kv("algebra_valid", true); // load_scenario validates
    if (sc.splitting) {
        rep.kv("splitting", "valid");
        rep.kv("dim_w", sc.splitting->topological_dim_w());
        rep.kv("k", sc.splitting->homogeneous_dim_w());
        rep.kv("carnot_subgroup_w",
               carnot::check_carnot_subgroup(*sc.algebra, sc.splitting->w_space()));
    } else {
        rep.kv("splitting", "absent");
    }
    rep.kv("phi", sc.phi ? "present" : "absent");
    rep.kv("ok", true);
    emit(g, rep);
    return kExitOk;
}

// Reproduces the non-Lipschitz intrinsic graph in the second Heisenberg
// group: W = {x1 = 0}, L = x1-axis (not normal), phi == exp(X1). The graph
// map moves second-layer distances like sqrt(eps) while the input moves like
// eps, so no Lipschitz bound is possible; phi itself is intrinsically
// Lipschitz (the projected quotients vanish).
int cmd_counterexample(const GlobalOpts& g, int ladder_count, double tol) {
    const auto h2 = carnot::make_heisenberg(2);
    const carnot::Subspace w = carnot::Subspace::span_of_basis(h2, {2, 3, 4, 5});
    const carnot::Subspace l = carnot::Subspace::span_of_basis(h2, {1});
    const carnot::ComplementProjector proj(h2, w, l);
    const carnot::Point c(h2, {1, 0, 0, 0, 0});

    carnot::Report rep;
    rep.kv("command", "counterexample");
    rep.kv("group", "h2");
    rep.kv("w", "span{X2,X3,X4,X5}");
    rep.kv("l", "span{X1}  (not normal)");
    rep.kv("phi", "constant exp(X1)");

    const carnot::Point phi0 = mul(carnot::Point(h2, {0, 0, 0, 0, 0}), c);
    std::vector<double> epss, rs, in_norms;
    double max_abs_err = 0;
    rep.section("ladder", {"eps", "graph_x1", "graph_x3", "graph_x5", "abs_err", "r", "input_norm"});
    for (int k = 1; k <= ladder_count; ++k) {
        const double eps = std::ldexp(1.0, -k);
        const carnot::Point weps(h2, {0, 0, eps, 0, 0});
        const carnot::Point ph = mul(weps, c);
        const carnot::Point want(h2, {1, 0, eps, 0, -eps / 2});
        double err = 0;
        for (int i = 0; i < 5; ++i) err = std::max(err, std::abs(ph.x[i] - want.x[i]));
        max_abs_err = std::max(max_abs_err, err);
        const double r = carnot::hdist(phi0, ph);
        epss.push_back(eps);
        rs.push_back(r);
        in_norms.push_back(carnot::hnorm(weps));
        rep.row(std::vector<double>{eps, ph.x[0], ph.x[2], ph.x[4], err, r,
                                    carnot::hnorm(weps)});
    }
    const double slope = loglog_slope(epss, rs);
    const double input_slope = loglog_slope(epss, in_norms);

    // intrinsic Lipschitz quotients of phi on the same graph samples
    double lip = 0;
    int used = 0;
    for (std::size_t i = 0; i < epss.size(); ++i)
        for (std::size_t j = i + 1; j < epss.size(); ++j) {
            const carnot::Point a = mul(carnot::Point(h2, {0, 0, epss[i], 0, 0}), c);
            const carnot::Point b = mul(carnot::Point(h2, {0, 0, epss[j], 0, 0}), c);
            const auto [pw, pl] = proj.project(mul(inv(a), b));
            const double den = carnot::hnorm(pw);
            if (den < 1e-14) continue;
            lip = std::max(lip, carnot::hnorm(pl) / den);
            ++used;
        }

    rep.kv("max_abs_err", max_abs_err);
    rep.kv("graph_increment_slope", slope);
    rep.kv("input_norm_slope", input_slope);
    rep.kv("intrinsic_lip_estimate", lip);
    rep.kv("lip_pairs_used", used);
    const bool ok = max_abs_err <= tol && std::abs(slope - 0.5) <= 0.05 &&
                    std::abs(input_slope - 1.0) <= 0.01;
    rep.kv("ok", ok);
    emit(g, rep);
    return ok ? kExitOk : kExitVerification;
}

int cmd_differentiate(const GlobalOpts& g, const std::string& scenario_path, double tol,
                      std::uint64_t seed, double t_first, double t_last) {
    const auto sc = carnot::load_scenario(scenario_path, g.catalog_dir);
    if (!sc.phi) throw carnot::semantic_error("scenario has no graph function");
    if (!sc.base_point) throw carnot::semantic_error("scenario has no base point");
    carnot::IntrinsicDiffOptions opt;
    opt.pansu.tol = tol > 0 ? tol : sc.tol;
    opt.pansu.seed = seed ? seed : sc.seed;
    opt.pansu.ladder = ladder_from(sc, t_first, t_last);
    const auto res = carnot::intrinsic_diff(*sc.phi, sc.base_w_point(), opt);

    carnot::Report rep;
    rep.kv("command", "differentiate");
    rep.kv("scenario", sc.name);
    rep.kv("group", sc.algebra->name());
    rep.kv("tol", opt.pansu.tol);
    rep.kv("converged", res.report.converged);
    if (!res.report.failure_reason.empty()) rep.kv("failure_reason", res.report.failure_reason);
    rep.kv("final_residual", res.report.final_residual);
    rep.kv("bracket_defect", res.report.bracket_defect);
    if (res.report.projection_identity_residual)
        rep.kv("projection_identity_residual", *res.report.projection_identity_residual);
    rep.section("residuals", {"scale", "sup_residual"});
    for (std::size_t i = 0; i < res.report.scales.size(); ++i)
        rep.row(std::vector<double>{res.report.scales[i], res.report.sup_residual_per_scale[i]});
    if (res.report.differential) {
        const auto& m = res.report.differential->matrix();
        rep.section("dphi_matrix", {"row", "entries"});
        for (std::size_t i = 0; i < m.rows(); ++i) {
            std::vector<std::string> cells{std::to_string(i + 1)};
            for (std::size_t j = 0; j < m.cols(); ++j)
                cells.push_back(carnot::format_double(m(i, j)));
            rep.row(cells);
        }
    }
    emit(g, rep);
    return res.report.converged ? kExitOk : kExitVerification;
}

int cmd_jacobian(const GlobalOpts& g, const std::string& scenario_path, std::uint64_t seed,
                 const std::vector<double>& deltas, int ball_samples) {
    const auto sc = carnot::load_scenario(scenario_path, g.catalog_dir);
    if (!sc.phi) throw carnot::semantic_error("scenario has no graph function");
    if (!sc.base_point) throw carnot::semantic_error("scenario has no base point");
    carnot::IntrinsicDiffOptions dopt;
    dopt.pansu.tol = sc.tol;
    const auto res = carnot::intrinsic_diff(*sc.phi, sc.base_w_point(), dopt);
    if (!res.report.differential || !res.report.converged)
        throw carnot::verification_error("differentiation did not converge at the base point");

    carnot::JacobianOptions jopt;
    if (!deltas.empty()) jopt.deltas = deltas;
    if (ball_samples > 0) jopt.ball_samples = ball_samples;
    jopt.seed = seed ? seed : sc.seed;
    const auto est = carnot::jacobian(*res.report.differential, jopt);

    carnot::Report rep;
    rep.kv("command", "jacobian");
    rep.kv("scenario", sc.name);
    rep.kv("group", sc.algebra->name());
    rep.kv("k", est.k);
    rep.kv("jacobian", est.value);
    rep.kv("jacobian_err", est.error);
    rep.kv("jacobian_extrapolated", est.ratio_extrapolated);
    rep.kv("ball_samples", est.ball_samples);
    rep.kv("seed", static_cast<unsigned long long>(jopt.seed));
    rep.section("per_delta", {"delta", "numerator", "denominator", "ratio"});
    for (std::size_t i = 0; i < est.deltas.size(); ++i)
        rep.row(std::vector<double>{est.deltas[i], est.numerator[i], est.denominator[i],
                                    est.ratio[i]});
    emit(g, rep);
    return kExitOk;
}

int cmd_area(const GlobalOpts& g, const std::string& scenario_path, std::uint64_t seed,
             int mc_samples, int ball_samples, const std::vector<double>& deltas, double rel_tol) {
    const auto sc = carnot::load_scenario(scenario_path, g.catalog_dir);
    if (!sc.phi) throw carnot::semantic_error("scenario has no graph function");
    if (!sc.v_box) throw carnot::semantic_error("scenario has no box V");
    carnot::AreaConfig cfg;
    cfg.seed = seed ? seed : sc.seed;
    if (mc_samples > 0) cfg.mc_samples = mc_samples;
    if (ball_samples > 0) cfg.ball_samples = ball_samples;
    if (!deltas.empty()) cfg.deltas = deltas;
    const auto rep_area = carnot::area_check(*sc.phi, *sc.v_box, cfg);

    carnot::Report rep;
    rep.kv("command", "area-check");
    rep.kv("scenario", sc.name);
    rep.kv("group", sc.algebra->name());
    rep.kv("k", sc.splitting->homogeneous_dim_w());
    rep.kv("lhs", rep_area.lhs);
    rep.kv("lhs_err", rep_area.lhs_err);
    rep.kv("rhs", rep_area.rhs);
    rep.kv("rhs_err", rep_area.rhs_err);
    rep.kv("rel_discrepancy", rep_area.rel_discrepancy);
    rep.kv("v_content", rep_area.v_content);
    rep.kv("mean_jacobian", rep_area.mean_jacobian);
    rep.kv("jacobian_stderr", rep_area.jacobian_stderr);
    rep.kv("mc_samples", rep_area.mc_samples);
    rep.kv("diff_failures", rep_area.diff_failures);
    rep.kv("lhs_samples", rep_area.lhs_samples);
    rep.kv("seed", static_cast<unsigned long long>(rep_area.seed));
    rep.section("per_delta", {"delta", "lhs_content", "v_content"});
    for (std::size_t i = 0; i < rep_area.lhs_ladder.deltas.size(); ++i)
        rep.row(std::vector<double>{rep_area.lhs_ladder.deltas[i], rep_area.lhs_ladder.values[i],
                                    rep_area.v_ladder.values[i]});
    const bool ok = rep_area.rel_discrepancy <= rel_tol;
    rep.kv("ok", ok);
    emit(g, rep);
    return ok ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical calculus on stratified (Carnot) groups"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--out", g.out_path, "write the report to a file instead of stdout");
    app.add_option("--catalog", g.catalog_dir,
                   "catalog directory (default: $CARNOT_CATALOG or ./catalog)");

    auto* catalog = app.add_subcommand("catalog", "list group definition files");

    std::string scenario;
    auto* validate = app.add_subcommand("validate", "validate a scenario file");
    validate->add_option("--scenario", scenario, "scenario file")->required();

    int ce_count = 14;
    double ce_tol = 1e-12;
    auto* counter = app.add_subcommand(
        "counterexample", "reproduce the non-Lipschitz graph map over a non-normal complement");
    counter->add_option("--ladder-count", ce_count, "number of dyadic scales (default 14)");
    counter->add_option("--tol", ce_tol, "tolerance on the closed-form graph values");

    double tol = 0, t_first = 0, t_last = 0;
    std::uint64_t seed = 0;
    auto* diff = app.add_subcommand("differentiate", "numerically differentiate the graph map");
    diff->add_option("--scenario", scenario, "scenario file")->required();
    diff->add_option("--tol", tol, "quotient tolerance (default: scenario tol)");
    diff->add_option("--seed", seed, "probe-direction seed (default: scenario seed)");
    diff->add_option("--ladder", [&t_first, &t_last](const std::vector<std::string>& v) {
        if (v.size() != 1) return false;
        const auto comma = v[0].find(',');
        if (comma == std::string::npos) return false;
        t_first = std::stod(v[0].substr(0, comma));
        t_last = std::stod(v[0].substr(comma + 1));
        return true;
    }, "scale ladder as t_first,t_last");

    std::vector<double> deltas;
    int ball_samples = 0, mc_samples = 0;
    auto* jac = app.add_subcommand("jacobian", "Jacobian of the differential at the base point");
    jac->add_option("--scenario", scenario, "scenario file")->required();
    jac->add_option("--seed", seed, "sampling seed (default: scenario seed)");
    jac->add_option("--deltas", deltas, "covering scales (descending)");
    jac->add_option("--ball-samples", ball_samples, "unit-ball sample count");

    double rel_tol = 0.05;
    auto* area = app.add_subcommand("area-check", "verify the graph area identity on box V");
    area->add_option("--scenario", scenario, "scenario file")->required();
    area->add_option("--seed", seed, "sampling seed (default: scenario seed)");
    area->add_option("--mc-samples", mc_samples, "Monte-Carlo sample count (default 10000)");
    area->add_option("--ball-samples", ball_samples, "unit-ball sample count per Jacobian");
    area->add_option("--deltas", deltas, "covering scales (descending)");
    area->add_option("--rel-tol", rel_tol, "pass/fail threshold on the relative discrepancy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (catalog->parsed()) return cmd_catalog(g);
        if (validate->parsed()) return cmd_validate(g, scenario);
        if (counter->parsed()) return cmd_counterexample(g, ce_count, ce_tol);
        if (diff->parsed()) return cmd_differentiate(g, scenario, tol, seed, t_first, t_last);
        if (jac->parsed()) return cmd_jacobian(g, scenario, seed, deltas, ball_samples);
        if (area->parsed()) return cmd_area(g, scenario, seed, mc_samples, ball_samples, deltas, rel_tol);
    } catch (const carnot::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const carnot::semantic_error& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return kExitSemantic;
    } catch (const carnot::verification_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kExitVerification;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
    return kExitUsage;
}
