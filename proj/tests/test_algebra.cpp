#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace carnot;
using namespace carnot::testing;

namespace {

std::vector<Rational> basis_vec(const StratifiedAlgebra& a, int i1) {
    std::vector<Rational> v(a.dim(), Rational(0));
    v[i1 - 1] = 1;
    return v;
}

TEST(Algebra, CatalogGroupsValidate) {
    for (const auto& a : catalog_algebras()) {
        const auto rep = validate_algebra(*a);
        EXPECT_TRUE(rep.ok()) << a->name() << " failed "
                              << (rep.violations.empty()
                                      ? ""
                                      : axiom_name(rep.violations.front().kind));
    }
    EXPECT_TRUE(validate_algebra(make_filiform_step4()).ok());
    EXPECT_TRUE(validate_algebra(make_abelian(3)).ok()); // all-zero brackets
}

TEST(Algebra, AntisymmetryViolationWitness) {
    // both c[1][2][3] and c[2][1][3] set to +1
    auto broken = StratifiedAlgebra::from_raw_constants(
        "broken", {2, 1}, {{1, 2, 3, Rational(1)}, {2, 1, 3, Rational(1)}});
    const auto rep = validate_algebra(broken);
    ASSERT_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.kind == AxiomViolation::Kind::antisymmetry) {
            found = true;
            EXPECT_EQ(v.witness, (std::array<int, 3>{1, 2, 3}));
        }
    EXPECT_TRUE(found);
}

TEST(Algebra, JacobiViolationDetected) {
    // filiform step 4 plus an extra [X2,X4] = X5 breaks Jacobi on (1,2,3)
    auto broken =
        StratifiedAlgebra("badjacobi", {2, 1, 1, 1},
                          {{1, 2, 3, Rational(1)},
                           {1, 3, 4, Rational(1)},
                           {1, 4, 5, Rational(1)},
                           {2, 4, 5, Rational(1)}});
    const auto rep = validate_algebra(broken);
    bool jacobi = false, antisym = false, grading = false;
    for (const auto& v : rep.violations) {
        jacobi |= v.kind == AxiomViolation::Kind::jacobi;
        antisym |= v.kind == AxiomViolation::Kind::antisymmetry;
        grading |= v.kind == AxiomViolation::Kind::grading;
    }
    EXPECT_TRUE(jacobi);
    EXPECT_FALSE(antisym);
    EXPECT_FALSE(grading);
}

TEST(Algebra, GradingViolationDetected) {
    auto broken = StratifiedAlgebra::from_raw_constants(
        "badgrading", {2, 1}, {{1, 2, 1, Rational(1)}, {2, 1, 1, Rational(-1)}});
    const auto rep = validate_algebra(broken);
    bool grading = false;
    for (const auto& v : rep.violations)
        if (v.kind == AxiomViolation::Kind::grading) {
            grading = true;
            EXPECT_EQ(v.witness, (std::array<int, 3>{1, 2, 1}));
        }
    EXPECT_TRUE(grading);
}

TEST(Algebra, StratificationViolationDetected) {
    // two layers, zero bracket: [V1,V1] cannot span V2
    auto broken = StratifiedAlgebra("flat", {2, 1}, {});
    const auto rep = validate_algebra(broken);
    bool strat = false;
    for (const auto& v : rep.violations)
        if (v.kind == AxiomViolation::Kind::stratification) {
            strat = true;
            EXPECT_EQ(v.witness[0], 2);
        }
    EXPECT_TRUE(strat);
}

TEST(Algebra, ConstructionErrors) {
    EXPECT_THROW(StratifiedAlgebra("deep", {1, 1, 1, 1, 1}, {}), semantic_error); // step cap
    EXPECT_THROW(StratifiedAlgebra("idx", {2, 1}, {{1, 2, 7, Rational(1)}}), semantic_error);
    EXPECT_THROW(StratifiedAlgebra("conflict", {2, 1},
                                   {{1, 2, 3, Rational(1)}, {2, 1, 3, Rational(1)}}),
                 semantic_error); // inconsistent with antisymmetric closure
    EXPECT_THROW(StratifiedAlgebra("empty", {}, {}), semantic_error);
    EXPECT_THROW(StratifiedAlgebra("nonpos", {2, 0}, {}), semantic_error);
}

TEST(Algebra, BracketValues) {
    const auto h2 = make_heisenberg(2);
    // [X3, X1] = -X5, antisymmetric to [X1,X3] = X5
    auto b = h2.bracket(basis_vec(h2, 3), basis_vec(h2, 1));
    std::vector<Rational> want(5, Rational(0));
    want[4] = -1;
    EXPECT_EQ(b, want);

    // [x, x] = 0 exactly for random rational x
    std::mt19937_64 rng(7);
    for (const auto& a : catalog_algebras())
        for (int t = 0; t < 20; ++t) {
            const auto x = rand_rpoint(*a, rng);
            EXPECT_TRUE(is_zero_vector(a->bracket(x.x, x.x)));
        }

    // bilinearity: [X1+X2, X2] = [X1,X2] = X3 in h1
    const auto h1 = make_heisenberg(1);
    std::vector<Rational> x(3, Rational(0));
    x[0] = 1;
    x[1] = 1;
    auto r = h1.bracket(x, basis_vec(h1, 2));
    std::vector<Rational> want3(3, Rational(0));
    want3[2] = 1;
    EXPECT_EQ(r, want3);

    EXPECT_THROW(h1.bracket(std::vector<Rational>(2, Rational(0)), basis_vec(h1, 1)),
                 semantic_error);
}

TEST(Algebra, SubspacePredicates) {
    const auto h1 = make_heisenberg(1);
    const auto h2 = make_heisenberg(2);

    EXPECT_TRUE(is_ideal(h1, Subspace::span_of_basis(h1, {2, 3})));
    EXPECT_FALSE(is_ideal(h2, Subspace::span_of_basis(h2, {1}))); // [X3,X1] = -X5 escapes
    EXPECT_TRUE(is_ideal(h2, Subspace::span_of_basis(h2, {1, 2, 3, 4, 5})));

    EXPECT_TRUE(is_graded_subalgebra(h2, Subspace::span_of_basis(h2, {2, 3, 4, 5})));
    Subspace diag(h1, {{Rational(1), Rational(0), Rational(1)}}); // X1 + X3
    EXPECT_FALSE(diag.homogeneous());
    EXPECT_FALSE(is_graded_subalgebra(h1, diag));
    EXPECT_TRUE(is_graded_subalgebra(h1, Subspace::zero(h1)));

    // homogeneous ideal is always a graded subalgebra
    std::mt19937_64 rng(21);
    for (const auto& c : normal_splitting_cases()) {
        EXPECT_TRUE(is_ideal(*c.alg, c.split->l_space())) << c.name;
        EXPECT_TRUE(is_graded_subalgebra(*c.alg, c.split->l_space())) << c.name;
    }
}

TEST(Algebra, SubspaceLayerSplitAndCoords) {
    const auto h2 = make_heisenberg(2);
    const auto w = Subspace::span_of_basis(h2, {2, 3, 4, 5});
    EXPECT_TRUE(w.homogeneous());
    EXPECT_EQ(w.layer_dim(0), 3);
    EXPECT_EQ(w.layer_dim(1), 1);
    EXPECT_EQ(w.homogeneous_dimension(), 5); // 3·1 + 1·2

    const std::vector<double> v{0, 1.5, -2, 0.25, 3};
    const auto c = w.coords_of(v);
    const auto back = w.vector_from_coords(c);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(back[i], v[i], 1e-12);

    EXPECT_THROW(Subspace(h2, {basis_vec(h2, 1), basis_vec(h2, 1)}), semantic_error);
}

TEST(Algebra, CarnotSubgroupChecker) {
    const auto h1 = make_heisenberg(1);
    const auto h2 = make_heisenberg(2);
    EXPECT_TRUE(check_carnot_subgroup(h2, Subspace::span_of_basis(h2, {2, 3, 4, 5})));
    EXPECT_TRUE(check_carnot_subgroup(h1, Subspace::span_of_basis(h1, {1})));
    EXPECT_FALSE(check_carnot_subgroup(h1, Subspace::span_of_basis(h1, {3})));
    // whole algebra is a Carnot subgroup of itself
    for (const auto& a : catalog_algebras()) {
        std::vector<int> all(a->dim());
        for (int i = 0; i < a->dim(); ++i) all[i] = i + 1;
        EXPECT_TRUE(check_carnot_subgroup(*a, Subspace::span_of_basis(*a, all))) << a->name();
    }
}

TEST(Algebra, NormalComplementIsCarnot) {
    const auto h1 = make_heisenberg(1);
    EXPECT_TRUE(check_normal_complement_is_carnot(h1, Subspace::span_of_basis(h1, {1}),
                                                  Subspace::span_of_basis(h1, {2, 3})));
    const auto h2 = make_heisenberg(2);
    EXPECT_THROW(check_normal_complement_is_carnot(h2, Subspace::span_of_basis(h2, {2, 3, 4, 5}),
                                                   Subspace::span_of_basis(h2, {1})),
                 semantic_error); // L is not an ideal
    const auto r2 = make_abelian(2);
    EXPECT_TRUE(check_normal_complement_is_carnot(r2, Subspace::span_of_basis(r2, {1}),
                                                  Subspace::span_of_basis(r2, {2})));
}

TEST(Algebra, RandomizedNormalComplementsAreCarnot) {
    std::mt19937_64 rng(2024);
    for (const auto& a : catalog_algebras()) {
        for (int t = 0; t < 25; ++t) {
            const auto [w_rows, l_rows] = random_horizontal_splitting(*a, rng);
            Subspace w(*a, w_rows), l(*a, l_rows);
            EXPECT_TRUE(check_normal_complement_is_carnot(*a, w, l)) << a->name();
        }
    }
    // catalog splittings, including the non-horizontal one in f23
    for (const auto& c : normal_splitting_cases())
        EXPECT_TRUE(
            check_normal_complement_is_carnot(*c.alg, c.split->w_space(), c.split->l_space()))
            << c.name;
}

} // namespace
