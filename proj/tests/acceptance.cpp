// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every tolerance is pinned here; nothing is deferred to
// runtime calibration. Run time is dominated by the area and Jacobian
// criteria (covering estimators at their default sample counts).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/carnot.hpp"

using namespace carnot;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::function<bool(std::string&)> run;
};

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

double coord_gap(const Point& a, const Point& b) {
    double scale = 1.0, worst = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        scale = std::max(scale, std::abs(b.x[i]));
        worst = std::max(worst, std::abs(a.x[i] - b.x[i]));
    }
    return worst / scale;
}

bool pairwise_within(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

struct CatalogEntry {
    std::string name;
    std::shared_ptr<const StratifiedAlgebra> alg;
    std::unique_ptr<const Splitting> split;
};

std::vector<CatalogEntry> catalog() {
    auto mk = [](StratifiedAlgebra a, std::vector<int> w, std::vector<int> l) {
        CatalogEntry e;
        e.name = a.name();
        e.alg = std::make_shared<const StratifiedAlgebra>(std::move(a));
        e.split = std::make_unique<const Splitting>(*e.alg, Subspace::span_of_basis(*e.alg, w),
                                                    Subspace::span_of_basis(*e.alg, l));
        return e;
    };
    std::vector<CatalogEntry> cs;
    cs.push_back(mk(make_abelian(2), {1}, {2}));
    cs.push_back(mk(make_abelian(3), {1, 2}, {3}));
    cs.push_back(mk(make_heisenberg(1), {1}, {2, 3}));
    cs.push_back(mk(make_heisenberg(2), {1, 2}, {3, 4, 5}));
    cs.push_back(mk(make_engel(), {2}, {1, 3, 4}));
    cs.push_back(mk(make_free_step2_3(), {2, 3, 6}, {1, 4, 5}));
    return cs;
}

Rational rand_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-4, 4), den(1, 4);
    return Rational(num(rng), den(rng));
}

// --- criterion 1: closed-form graph values in h2 ---------------------------
bool criterion1(std::string& detail) {
    const auto h2 = make_heisenberg(2);
    const Point c(h2, {1, 0, 0, 0, 0});
    double max_err = 0;
    for (int k = 1; k <= 14; ++k) {
        const double eps = std::ldexp(1.0, -k);
        const Point got = mul(Point(h2, {0, 0, eps, 0, 0}), c);
        const Point want(h2, {1, 0, eps, 0, -eps / 2});
        for (int i = 0; i < 5; ++i) max_err = std::max(max_err, std::abs(got.x[i] - want.x[i]));
    }
    std::ostringstream os;
    os << "max_abs_err=" << max_err;
    detail = os.str();
    return max_err <= 1e-12;
}

// --- criterion 2: Hoelder asymptotics of the graph increments ---------------
bool criterion2(std::string& detail) {
    const auto h2 = make_heisenberg(2);
    const Point c(h2, {1, 0, 0, 0, 0});
    const Point phi0 = mul(identity<double>(h2), c);
    std::vector<double> eps, incr, input;
    for (int k = 1; k <= 14; ++k) {
        const double e = std::ldexp(1.0, -k);
        eps.push_back(e);
        incr.push_back(hdist(phi0, mul(Point(h2, {0, 0, e, 0, 0}), c)));
        input.push_back(hnorm(Point(h2, {0, 0, e, 0, 0})));
    }
    const double s_incr = loglog_slope(eps, incr);
    const double s_in = loglog_slope(eps, input);
    std::ostringstream os;
    os << "increment_slope=" << s_incr << " input_slope=" << s_in;
    detail = os.str();
    return std::abs(s_incr - 0.5) <= 0.05 && std::abs(s_in - 1.0) <= 0.01;
}

// --- criterion 3: algebraic property suite ----------------------------------
bool criterion3(std::string& detail) {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    long long failures = 0, cases = 0;
    for (const auto& e : catalog()) {
        const auto& A = *e.alg;
        for (int t = 0; t < 1000; ++t) {
            ++cases;
            // exact rational axioms
            std::vector<Rational> gx(A.dim()), hx(A.dim()), kx(A.dim());
            for (auto& v : gx) v = rand_rational(rng);
            for (auto& v : hx) v = rand_rational(rng);
            for (auto& v : kx) v = rand_rational(rng);
            const RPoint g(A, gx), h(A, hx), k(A, kx);
            if (!(mul(mul(g, h), k).x == mul(g, mul(h, k)).x)) ++failures;
            if (!(mul(g, identity<Rational>(A)).x == g.x)) ++failures;
            if (!is_zero_vector(mul(g, inv(g)).x)) ++failures;

            // float: associativity, dilation automorphism, norm homogeneity
            std::vector<double> ax(A.dim()), bx(A.dim());
            for (auto& v : ax) v = uni(rng);
            for (auto& v : bx) v = uni(rng);
            const Point a(A, ax), b(A, bx);
            if (coord_gap(mul(mul(a, b), to_double(g)), mul(a, mul(b, to_double(g)))) > 1e-9)
                ++failures;
            const double lam = 0.25 + 0.125 * (t % 16);
            if (coord_gap(dilate(lam, mul(a, b)), mul(dilate(lam, a), dilate(lam, b))) > 1e-9)
                ++failures;
            if (std::abs(hnorm(dilate(lam, a)) - lam * hnorm(a)) >
                1e-9 * std::max(1.0, hnorm(a)))
                ++failures;
            if (hnorm(inv(a)) != hnorm(a)) ++failures;
        }
    }
    std::ostringstream os;
    os << "cases=" << cases << " failures=" << failures;
    detail = os.str();
    return failures == 0;
}

// --- criterion 4: projection suite ------------------------------------------
bool criterion4(std::string& detail) {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst_recon = 0, worst_ident = 0;
    for (const auto& e : catalog()) {
        for (int t = 0; t < 1000; ++t) {
            std::vector<double> qx(e.alg->dim());
            for (auto& v : qx) v = uni(rng);
            const Point q(*e.alg, qx);
            const auto [qw, ql] = e.split->project(q);
            worst_recon = std::max(worst_recon, coord_gap(mul(qw, ql), q));
            std::vector<double> wc(e.split->topological_dim_w());
            for (auto& v : wc) v = uni(rng);
            const Point a = e.split->embed_w(wc);
            const auto rep = verify_normal_projection_identities(*e.split, q, a);
            worst_ident = std::max(worst_ident, rep.max_discrepancy);
        }
    }
    std::ostringstream os;
    os << "worst_reconstruction=" << worst_recon << " worst_identity=" << worst_ident;
    detail = os.str();
    return worst_recon <= 1e-9 && worst_ident <= 1e-9;
}

// --- criterion 5: translation suite ------------------------------------------
bool criterion5(std::string& detail) {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    double worst_graph = 0, worst_paths = 0;
    for (const auto& e : catalog()) {
        const int dw = e.split->topological_dim_w();
        std::vector<Polynomial> rules;
        for (int i = 0; i < e.split->l_space().dim(); ++i) {
            Polynomial p = Polynomial::constant(dw, uni(rng));
            for (int v = 0; v < dw; ++v) {
                p = p + Polynomial::variable(dw, v).scaled(uni(rng));
                p = p + (Polynomial::variable(dw, v) * Polynomial::variable(dw, v))
                            .scaled(uni(rng));
            }
            rules.push_back(p);
        }
        BoxDomain dom({BoxDomain::Box{std::vector<double>(dw, -2.0), std::vector<double>(dw, 2.0)}});
        const auto phi = GraphFunction::poly(*e.split, dom, rules);
        for (int t = 0; t < 40; ++t) {
            std::vector<double> qx(e.alg->dim());
            for (auto& v : qx) v = uni(rng);
            const Point q(*e.alg, qx);
            const auto [qw, ql] = e.split->project(q);
            const auto phi_q = translate(phi, q);
            for (int u = 0; u < 25; ++u) {
                std::vector<double> wc(dw);
                for (auto& v : wc) v = uni(rng);
                const Point w = e.split->embed_w(wc);
                const Point a = mul(qw, w);
                // graph identity
                worst_graph =
                    std::max(worst_graph, coord_gap(phi_q.graph_map(a), mul(q, phi.graph_map(w))));
                // closed form against the projection form
                const Point fast = phi_q.eval(a);
                const auto [pw, pl] = e.split->project(mul(inv(q), a));
                const Point generic = mul(inv(pl), phi.eval(pw));
                worst_paths = std::max(worst_paths, coord_gap(fast, generic));
            }
        }
    }
    std::ostringstream os;
    os << "worst_graph_identity=" << worst_graph << " worst_path_agreement=" << worst_paths;
    detail = os.str();
    return worst_graph <= 1e-9 && worst_paths <= 1e-9;
}

// --- criterion 6: differentiation consistency --------------------------------
bool criterion6(std::string& detail) {
    std::ostringstream os;
    bool ok = true;

    // (a) intrinsically linear graph in h1: residual <= 1e-9 at every scale,
    //     and the differential is the function itself
    const auto h1 = make_heisenberg(1);
    const Splitting s1(h1, Subspace::span_of_basis(h1, {1}), Subspace::span_of_basis(h1, {2, 3}));
    Mat<double> theta(1, 1);
    theta(0, 0) = 0.5;
    const auto ell = IntrinsicLinearMap::from_first_layer(s1, theta);
    const auto phi_lin = GraphFunction::intrinsic_linear(s1, BoxDomain::interval(-2, 2), ell);
    const auto lin = intrinsic_diff(phi_lin, s1.embed_w({0.75}));
    double worst_scale_residual = 0;
    for (const auto& curve : lin.report.residuals)
        for (double r : curve) worst_scale_residual = std::max(worst_scale_residual, r);
    ok = ok && lin.report.converged && worst_scale_residual <= 1e-9;
    double matrix_gap = 0;
    if (lin.differential) {
        const auto &m0 = ell.hom().matrix(), &m1 = lin.differential->hom().matrix();
        for (std::size_t i = 0; i < m0.rows(); ++i)
            for (std::size_t j = 0; j < m0.cols(); ++j)
                matrix_gap = std::max(matrix_gap, std::abs(m0(i, j) - m1(i, j)));
    } else {
        ok = false;
    }
    ok = ok && matrix_gap <= 1e-9;
    os << "linear_residual=" << worst_scale_residual << " linear_matrix_gap=" << matrix_gap;

    // (b) parabola slope at a0 = 1
    const auto r2 = make_abelian(2);
    const Splitting s2(r2, Subspace::span_of_basis(r2, {1}), Subspace::span_of_basis(r2, {2}));
    const auto parab = GraphFunction::poly(s2, BoxDomain::interval(-3, 3),
                                           {Polynomial::parse("w1^2", 1)});
    IntrinsicDiffOptions popt;
    popt.pansu.tol = 1e-3;
    const auto pres = intrinsic_diff(parab, s2.embed_w({1.0}), popt);
    double slope = 0;
    if (pres.report.differential) slope = pres.report.differential->matrix()(1, 0);
    ok = ok && pres.report.converged && std::abs(slope - 2.0) <= 1e-3;
    os << " parabola_slope=" << slope;

    // (c) graph factorization dPhi[w] = w·d^phi phi[w] on random w, for both
    //     converged differentials above
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst_factor = 0;
    if (lin.differential)
        for (int t = 0; t < 200; ++t) {
            const Point w = s1.embed_w({uni(rng)});
            worst_factor = std::max(
                worst_factor, coord_gap(mul(w, lin.differential->value(w)),
                                        lin.report.differential->apply(w)));
        }
    if (pres.differential)
        for (int t = 0; t < 200; ++t) {
            const Point w = s2.embed_w({uni(rng)});
            worst_factor = std::max(
                worst_factor, coord_gap(mul(w, pres.differential->value(w)),
                                        pres.report.differential->apply(w)));
        }
    ok = ok && worst_factor <= 1e-9;
    os << " worst_factorization=" << worst_factor;

    // (d) projection-identity residual of every converged graph differential
    double worst_proj = 0;
    for (const auto* rep : {&lin.report, &pres.report})
        if (rep->projection_identity_residual)
            worst_proj = std::max(worst_proj, *rep->projection_identity_residual);
    ok = ok && worst_proj <= 1e-6;
    os << " worst_projection_identity=" << worst_proj;

    detail = os.str();
    return ok;
}

// --- criterion 7: area identity at desk scale --------------------------------
bool criterion7(std::string& detail) {
    std::ostringstream os;
    bool ok = true;

    const auto r2 = make_abelian(2);
    const Splitting s2(r2, Subspace::span_of_basis(r2, {1}), Subspace::span_of_basis(r2, {2}));
    const BoxDomain::Box v{{0.0}, {1.0}};

    // (a) line graphs, slopes 0, 1, 3: estimator sides and the classical
    //     oracle sqrt(1+m^2) pairwise within 5%
    for (double m : {0.0, 1.0, 3.0}) {
        const auto phi = GraphFunction::poly(s2, BoxDomain::interval(-2, 2),
                                             {Polynomial::variable(1, 0).scaled(m)});
        AreaConfig cfg;
        cfg.seed = 700 + static_cast<int>(m);
        const auto rep = area_check(phi, v, cfg);
        const double oracle = classical_area_oracle(phi, v);
        const bool here = pairwise_within(rep.lhs, rep.rhs, 0.05) &&
                          pairwise_within(rep.lhs, oracle, 0.05) &&
                          pairwise_within(rep.rhs, oracle, 0.05);
        os << " m" << m << ":lhs=" << rep.lhs << ",rhs=" << rep.rhs << ",oracle=" << oracle
           << (here ? "" : " FAIL");
        ok = ok && here;
    }

    // (b) parabola: the Jacobian integral against the precomputed value of
    //     the elementary integral of sqrt(1+4x^2) on [0,1]
    {
        const double frozen = 1.4789428575445974;
        const auto phi = GraphFunction::poly(s2, BoxDomain::interval(-3, 3),
                                             {Polynomial::parse("w1^2", 1)});
        AreaConfig cfg;
        cfg.seed = 707;
        const auto rep = area_check(phi, v, cfg);
        const double oracle = classical_area_oracle(phi, v, 1200);
        const bool here = std::abs(rep.rhs - frozen) <= 0.05 * frozen &&
                          std::abs(oracle - frozen) <= 1e-6;
        os << " parabola:rhs=" << rep.rhs << ",frozen=" << frozen << (here ? "" : " FAIL");
        ok = ok && here;
    }

    // (c) horizontal line graph in h1: covering vs curve length vs integral
    {
        const auto h1 = make_heisenberg(1);
        const Splitting s1(h1, Subspace::span_of_basis(h1, {1}),
                           Subspace::span_of_basis(h1, {2, 3}));
        Mat<double> theta(1, 1);
        theta(0, 0) = 0.75;
        const auto phi = GraphFunction::intrinsic_linear(
            s1, BoxDomain::interval(-2, 2), IntrinsicLinearMap::from_first_layer(s1, theta));
        AreaConfig cfg;
        cfg.seed = 711;
        const auto rep = area_check(phi, v, cfg);
        std::vector<Point> curve;
        for (int i = 0; i <= 4000; ++i) curve.push_back(phi.graph_map(s1.embed_w({i / 4000.0})));
        const double len = curve_length(curve).value;
        const bool here = pairwise_within(rep.lhs, rep.rhs, 0.05) &&
                          pairwise_within(rep.lhs, len, 0.05) &&
                          pairwise_within(rep.rhs, len, 0.05);
        os << " h1:lhs=" << rep.lhs << ",rhs=" << rep.rhs << ",curve=" << len
           << (here ? "" : " FAIL");
        ok = ok && here;
    }

    detail = os.str();
    return ok;
}

// --- criterion 8: Jacobian properties -----------------------------------------
bool criterion8(std::string& detail) {
    std::ostringstream os;
    bool ok = true;

    // identity embeddings: J = 1 within error bars (k = 1 and k = 2)
    const auto h1 = make_heisenberg(1);
    const Splitting s1(h1, Subspace::span_of_basis(h1, {1}), Subspace::span_of_basis(h1, {2, 3}));
    const auto r3 = make_abelian(3);
    const Splitting s3(r3, Subspace::span_of_basis(r3, {1, 2}), Subspace::span_of_basis(r3, {3}));
    for (const Splitting* s : {&s1, &s3}) {
        const auto est = jacobian(HomogeneousHom::identity_embedding(s->w_space()));
        const bool here = std::abs(est.value - 1.0) <= est.error + 1e-9;
        os << " identity_k" << s->homogeneous_dim_w() << ":J=" << est.value
           << ",err=" << est.error << (here ? "" : " FAIL");
        ok = ok && here;
    }

    // dilation precomposition: J(F∘δλ)/J(F) = λ^k within combined error bars
    // for the identity (k=1) and a shear map on the abelian plane (k=2)
    const auto idh = HomogeneousHom::identity_embedding(s1.w_space());
    Mat<double> shear_theta(2, 1);
    shear_theta(0, 0) = 1.0;
    shear_theta(1, 0) = 0.5;
    const auto shear = IntrinsicLinearMap::from_first_layer(s3, shear_theta).hom();
    for (const auto* F : {&idh, &shear}) {
        const int k = F->source().homogeneous_dimension();
        const auto base = jacobian(*F);
        for (double lam : {0.5, 2.0}) {
            const auto scaled = jacobian(F->precompose_dilation(lam));
            const double want = std::pow(lam, k);
            const double got = scaled.value / base.value;
            const double bars =
                (scaled.error / base.value + base.error * scaled.value / (base.value * base.value));
            const bool here = std::abs(got - want) <= bars + 0.1 * want;
            os << " k" << k << ",lam" << lam << ":ratio=" << got << ",want=" << want
               << (here ? "" : " FAIL");
            ok = ok && here;
        }
    }
    detail = os.str();
    return ok;
}

// --- criterion 9: Carnot-subgroup checker --------------------------------------
bool criterion9(std::string& detail) {
    const auto h2 = make_heisenberg(2);
    const auto h1 = make_heisenberg(1);
    bool ok = check_carnot_subgroup(h2, Subspace::span_of_basis(h2, {2, 3, 4, 5}));
    ok = ok && !check_carnot_subgroup(h1, Subspace::span_of_basis(h1, {3}));
    int randomized = 0;
    std::mt19937_64 rng(909);
    for (const auto& e : catalog()) {
        // shipped splitting
        ok = ok && check_normal_complement_is_carnot(*e.alg, e.split->w_space(),
                                                     e.split->l_space());
        // randomized horizontal splittings with ideal complements
        for (int t = 0; t < 40; ++t) {
            const int n = e.alg->dim();
            const int d1 = e.alg->layer_dim(0);
            std::vector<Rational> v(n, Rational(0));
            bool nz = false;
            for (int i = 0; i < d1; ++i) {
                v[i] = rand_rational(rng);
                nz = nz || v[i] != Rational(0);
            }
            if (!nz) continue;
            std::vector<std::vector<Rational>> w_rows{v}, l_rows;
            Mat<Rational> acc = Mat<Rational>::from_rows(w_rows);
            for (int i = 0; i < n; ++i) {
                std::vector<Rational> basis(n, Rational(0));
                basis[i] = 1;
                if (i < d1) {
                    Mat<Rational> trial = acc;
                    trial.append_row(basis);
                    if (rank(trial) != acc.rows() + 1) continue;
                    acc.append_row(basis);
                }
                if (i < d1 && acc.rows() <= static_cast<std::size_t>(d1)) l_rows.push_back(basis);
                if (i >= d1) l_rows.push_back(basis);
            }
            ok = ok && check_normal_complement_is_carnot(*e.alg, Subspace(*e.alg, w_rows),
                                                         Subspace(*e.alg, l_rows));
            ++randomized;
        }
    }
    std::ostringstream os;
    os << "randomized_splittings=" << randomized;
    detail = os.str();
    return ok && randomized > 100;
}

// --- criterion 10: blow-up diagnostic -------------------------------------------
bool criterion10(std::string& detail) {
    const auto r2 = make_abelian(2);
    const Splitting s2(r2, Subspace::span_of_basis(r2, {1}), Subspace::span_of_basis(r2, {2}));
    const auto phi = GraphFunction::poly(s2, BoxDomain::interval(-6, 8),
                                         {Polynomial::parse("w1^2", 1)});
    const Point a0 = s2.embed_w({1.0});
    const std::vector<double> lambdas{1, 2, 4, 8, 16};
    const Subspace tangent(r2, {{Rational(1), Rational(2)}});
    const Subspace wrong(r2, {{Rational(1), Rational(0)}});
    BlowupOptions opt;
    opt.graph_samples = 40000;
    opt.tangent_samples = 4000;
    opt.seed = 1010;
    const auto good = blowup_tangent_check(phi, a0, tangent, lambdas, 2.0, opt);
    const auto bad = blowup_tangent_check(phi, a0, wrong, lambdas, 2.0, opt);
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < good.distances.size(); ++i)
        monotone = monotone && good.distances[i + 1] <= 1.1 * good.distances[i];
    const bool separated = good.distances.back() < bad.distances.back() / 5;
    std::ostringstream os;
    os << "trace=";
    for (double d : good.distances) os << d << ",";
    os << " wrong_final=" << bad.distances.back();
    detail = os.str();
    return monotone && separated;
}

} // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "closed-form graph values in h2", criterion1},
        {2, "Hoelder asymptotics of the non-Lipschitz graph", criterion2},
        {3, "group axioms, dilations, norms (randomized)", criterion3},
        {4, "projection reconstruction and normal-case identities", criterion4},
        {5, "intrinsic translations: graph identity and closed form", criterion5},
        {6, "differentiation consistency", criterion6},
        {7, "area identity against independent oracles", criterion7},
        {8, "Jacobian normalization and dilation homogeneity", criterion8},
        {9, "Carnot-subgroup checker", criterion9},
        {10, "blow-up tangent diagnostic", criterion10},
    };
    int failures = 0;
    for (auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s (%s; %.2fs)\n", pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), detail.c_str(), secs);
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
