#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace carnot;
using namespace carnot::testing;

namespace {

TEST(Splitting, ClosedFormFactorsOnH1) {
    // W = span{X1}, L = span{X2,X3}: (x,y,t) = (x,0,0)·(0,y,t-xy/2)
    const auto h1 = make_heisenberg(1);
    const Splitting s(h1, Subspace::span_of_basis(h1, {1}), Subspace::span_of_basis(h1, {2, 3}));
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto g = rand_rpoint(h1, rng);
        const auto [gw, gl] = s.project(g);
        EXPECT_EQ(gw.x, (std::vector<Rational>{g.x[0], 0, 0}));
        EXPECT_EQ(gl.x, (std::vector<Rational>{0, g.x[1], g.x[2] - g.x[0] * g.x[1] / 2}));
        EXPECT_TRUE(rpoints_equal(mul(gw, gl), g));
    }
    // identity splits into identities
    const auto [ew, el] = s.project(identity<double>(h1));
    EXPECT_TRUE(is_zero_vector(ew.x));
    EXPECT_TRUE(is_zero_vector(el.x));
}

TEST(Splitting, ReconstructionOnCatalog) {
    std::mt19937_64 rng(7);
    for (const auto& c : normal_splitting_cases()) {
        for (int t = 0; t < 300; ++t) {
            const auto g = rand_point(*c.alg, rng);
            const auto [gw, gl] = c.split->project(g);
            EXPECT_LE(coord_rel_err(mul(gw, gl), g), 1e-9) << c.name;
            EXPECT_TRUE(c.split->in_w(gw, 1e-9)) << c.name;
            EXPECT_TRUE(c.split->in_l(gl, 1e-9)) << c.name;
        }
        for (int t = 0; t < 50; ++t) { // exact path
            const auto g = rand_rpoint(*c.alg, rng);
            const auto [gw, gl] = c.split->project(g);
            EXPECT_TRUE(rpoints_equal(mul(gw, gl), g)) << c.name;
        }
    }
}

TEST(Splitting, FactorsAreUnique) {
    std::mt19937_64 rng(11);
    for (const auto& c : normal_splitting_cases()) {
        const int dw = c.split->topological_dim_w();
        const int dl = c.split->l_space().dim();
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int t = 0; t < 200; ++t) {
            std::vector<double> wc(dw), lc(dl);
            for (auto& v : wc) v = uni(rng);
            for (auto& v : lc) v = uni(rng);
            const Point w = c.split->embed_w(wc), l = c.split->embed_l(lc);
            const auto [pw, pl] = c.split->project(mul(w, l));
            EXPECT_LE(coord_rel_err(pw, w), 1e-9) << c.name;
            EXPECT_LE(coord_rel_err(pl, l), 1e-9) << c.name;
        }
    }
}

TEST(Splitting, DilationEquivariance) {
    std::mt19937_64 rng(13);
    for (const auto& c : normal_splitting_cases()) {
        for (int t = 0; t < 100; ++t) {
            const auto g = rand_point(*c.alg, rng);
            const double lam = 0.25 + (t % 8) * 0.5;
            const auto [gw, gl] = c.split->project(g);
            const auto [dw, dl] = c.split->project(dilate(lam, g));
            EXPECT_LE(coord_rel_err(dw, dilate(lam, gw)), 1e-9) << c.name;
            EXPECT_LE(coord_rel_err(dl, dilate(lam, gl)), 1e-9) << c.name;
        }
    }
}

TEST(Splitting, NormalProjectionIdentities) {
    std::mt19937_64 rng(17);
    for (const auto& c : normal_splitting_cases()) {
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int t = 0; t < 200; ++t) {
            const auto q = rand_point(*c.alg, rng);
            std::vector<double> wc(c.split->topological_dim_w());
            for (auto& v : wc) v = uni(rng);
            const Point a = c.split->embed_w(wc);
            const auto rep = verify_normal_projection_identities(*c.split, q, a);
            EXPECT_LE(rep.max_discrepancy, 1e-9) << c.name;
        }
    }
}

TEST(Splitting, IdentitiesDegenerateCases) {
    const auto h1 = make_heisenberg(1);
    const Splitting s(h1, Subspace::span_of_basis(h1, {1}), Subspace::span_of_basis(h1, {2, 3}));
    // q = e: pi_W(a) = a and pi_L(a) = e
    const Point a = s.embed_w({0.75});
    const auto rep = verify_normal_projection_identities(s, identity<double>(h1), a);
    EXPECT_LE(rep.max_discrepancy, 1e-12);
    // a not in W is rejected
    EXPECT_THROW(verify_normal_projection_identities(s, a, Point(h1, {0, 1, 0})), semantic_error);

    // abelian: pi_L(q^-1·a) = -q_L
    const auto r2 = make_abelian(2);
    const Splitting sr(r2, Subspace::span_of_basis(r2, {1}), Subspace::span_of_basis(r2, {2}));
    const Point q(r2, {0.3, -0.8});
    const auto [pw, pl] = sr.project(mul(inv(q), sr.embed_w({0.5})));
    EXPECT_NEAR(pl.x[1], 0.8, 1e-15);
    EXPECT_NEAR(pw.x[0], 0.2, 1e-15);
}

TEST(Splitting, ConstructionDiagnoses) {
    const auto h1 = make_heisenberg(1);
    const auto h2 = make_heisenberg(2);
    // dimension failure
    EXPECT_THROW(Splitting(h1, Subspace::span_of_basis(h1, {1}), Subspace::span_of_basis(h1, {2})),
                 semantic_error);
    // intersection failure
    EXPECT_THROW(Splitting(h1, Subspace::span_of_basis(h1, {1, 2}),
                           Subspace::span_of_basis(h1, {2, 3})),
                 semantic_error);
    // L not an ideal (horizontal one-dimensional L in h2)
    try {
        Splitting(h2, Subspace::span_of_basis(h2, {2, 3, 4, 5}), Subspace::span_of_basis(h2, {1}));
        FAIL() << "expected semantic_error";
    } catch (const semantic_error& e) {
        EXPECT_NE(std::string(e.what()).find("ideal"), std::string::npos);
    }
    // W not graded
    EXPECT_THROW(Splitting(h1, Subspace(h1, {{Rational(1), Rational(0), Rational(1)}}),
                           Subspace::span_of_basis(h1, {2, 3})),
                 semantic_error);
}

TEST(Splitting, RandomizedHorizontalSplittingsValidate) {
    std::mt19937_64 rng(23);
    for (const auto& a : catalog_algebras()) {
        for (int t = 0; t < 10; ++t) {
            const auto [w_rows, l_rows] = random_horizontal_splitting(*a, rng);
            const Splitting s = make_splitting(*a, w_rows, l_rows);
            for (int u = 0; u < 20; ++u) {
                const auto g = rand_point(*a, rng);
                const auto [gw, gl] = s.project(g);
                EXPECT_LE(coord_rel_err(mul(gw, gl), g), 1e-9) << a->name();
            }
        }
    }
}

TEST(Splitting, HomogeneousDimensions) {
    const auto cases = normal_splitting_cases();
    // r2: W = x-axis (k=1); r3: plane (k=2); h1: horizontal (k=1);
    // h2: horizontal plane (k=2); engel: one horizontal direction (k=1);
    // f23: heisenberg-like subgroup spanning {X2,X3,X6} (k=4)
    const std::vector<int> want{1, 2, 1, 2, 1, 4};
    for (std::size_t i = 0; i < cases.size(); ++i)
        EXPECT_EQ(cases[i].split->homogeneous_dim_w(), want[i]) << cases[i].name;
}

TEST(Splitting, SolverHandlesNonNormalComplement) {
    // W = {x1 = 0}, L = x1-axis in h2: complementary subgroups, L not normal.
    // The layered solver still factors uniquely; with the constant graph value
    // c = exp(X1), increments of the graph map stay inside W, so pi_L = e.
    const auto h2 = make_heisenberg(2);
    ComplementProjector proj(h2, Subspace::span_of_basis(h2, {2, 3, 4, 5}),
                             Subspace::span_of_basis(h2, {1}));
    std::mt19937_64 rng(29);
    const Point c(h2, {1, 0, 0, 0, 0});
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Point w(h2, {0, uni(rng), uni(rng), uni(rng), uni(rng)});
        Point wp(h2, {0, uni(rng), uni(rng), uni(rng), uni(rng)});
        const Point delta = mul(inv(mul(w, c)), mul(wp, c));
        const auto [pw, pl] = proj.project(delta);
        EXPECT_LE(hnorm(pl), 1e-12);
        EXPECT_LE(coord_rel_err(mul(pw, pl), delta), 1e-12);
    }
}

} // namespace
