#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "carnot/carnot.hpp"

namespace carnot::testing {

/// A catalog group together with its shipped normal-L splitting.
struct CatalogCase {
    std::string name;
    std::shared_ptr<const StratifiedAlgebra> alg;
    std::unique_ptr<const Splitting> split;
};

inline CatalogCase make_case(StratifiedAlgebra a, std::vector<int> w_idx, std::vector<int> l_idx) {
    CatalogCase c;
    c.name = a.name();
    c.alg = std::make_shared<const StratifiedAlgebra>(std::move(a));
    c.split = std::make_unique<const Splitting>(*c.alg, Subspace::span_of_basis(*c.alg, w_idx),
                                                Subspace::span_of_basis(*c.alg, l_idx));
    return c;
}

/// Every shipped splitting has a normal L.
inline std::vector<CatalogCase> normal_splitting_cases() {
    std::vector<CatalogCase> cs;
    cs.push_back(make_case(make_abelian(2), {1}, {2}));
    cs.push_back(make_case(make_abelian(3), {1, 2}, {3}));
    cs.push_back(make_case(make_heisenberg(1), {1}, {2, 3}));
    cs.push_back(make_case(make_heisenberg(2), {1, 2}, {3, 4, 5}));
    cs.push_back(make_case(make_engel(), {2}, {1, 3, 4}));
    cs.push_back(make_case(make_free_step2_3(), {2, 3, 6}, {1, 4, 5}));
    return cs;
}

inline std::vector<std::shared_ptr<const StratifiedAlgebra>> catalog_algebras() {
    std::vector<std::shared_ptr<const StratifiedAlgebra>> as;
    for (auto make : {make_abelian(2), make_abelian(3), make_heisenberg(1), make_heisenberg(2),
                      make_engel(), make_free_step2_3()})
        as.push_back(std::make_shared<const StratifiedAlgebra>(std::move(make)));
    return as;
}

inline Rational rand_rational(std::mt19937_64& rng, int num_range = 4, int den_max = 4) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, den_max);
    return Rational(num(rng), den(rng));
}

inline RPoint rand_rpoint(const StratifiedAlgebra& a, std::mt19937_64& rng) {
    std::vector<Rational> x(a.dim());
    for (auto& v : x) v = rand_rational(rng);
    return RPoint(a, std::move(x));
}

inline Point rand_point(const StratifiedAlgebra& a, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    std::vector<double> x(a.dim());
    for (auto& v : x) v = uni(rng);
    return Point(a, std::move(x));
}

/// Coordinate-wise relative error on unit-scale data. Algebraic identities
/// are asserted in this metric: the homogeneous norm of a difference takes
/// the a-th root of layer-a coordinate errors, so rounding-level agreement
/// (1e-16) would read as 1e-8/1e-5/1e-4 at layers 2/3/4 under hdist.
inline double coord_rel_err(const Point& got, const Point& want) {
    double scale = 1.0, worst = 0.0;
    for (std::size_t i = 0; i < got.x.size(); ++i) {
        scale = std::max(scale, std::abs(want.x[i]));
        worst = std::max(worst, std::abs(got.x[i] - want.x[i]));
    }
    return worst / scale;
}

inline bool rpoints_equal(const RPoint& a, const RPoint& b) { return a.x == b.x; }

/// Random splitting with horizontal abelian W and L = (complement in V_1) ⊕
/// deeper layers; such an L is always an ideal. Returns the basis rows.
inline std::pair<std::vector<std::vector<Rational>>, std::vector<std::vector<Rational>>>
random_horizontal_splitting(const StratifiedAlgebra& A, std::mt19937_64& rng) {
    const int n = A.dim();
    const int d1 = A.layer_dim(0);
    std::vector<std::vector<Rational>> w_rows;
    // one random horizontal direction; in abelian groups optionally two
    for (;;) {
        std::vector<Rational> v(n, Rational(0));
        bool nonzero = false;
        for (int i = 0; i < d1; ++i) {
            v[i] = rand_rational(rng, 3, 3);
            nonzero = nonzero || v[i] != Rational(0);
        }
        if (nonzero) {
            w_rows.push_back(std::move(v));
            break;
        }
    }
    if (A.step() == 1 && d1 >= 3) {
        // abelian: any complement works, add one more independent direction
        for (;;) {
            std::vector<Rational> v(n, Rational(0));
            for (int i = 0; i < d1; ++i) v[i] = rand_rational(rng, 3, 3);
            Mat<Rational> m = Mat<Rational>::from_rows(w_rows);
            m.append_row(v);
            if (rank(m) == w_rows.size() + 1) {
                w_rows.push_back(std::move(v));
                break;
            }
        }
    }
    // L: extend W's first-layer span to all of V_1 with standard vectors
    std::vector<std::vector<Rational>> l_rows;
    Mat<Rational> acc = Mat<Rational>::from_rows(w_rows);
    for (int i = 0; i < d1; ++i) {
        std::vector<Rational> e(n, Rational(0));
        e[i] = 1;
        Mat<Rational> trial = acc;
        trial.append_row(e);
        if (rank(trial) == acc.rows() + 1) {
            acc.append_row(e);
            l_rows.push_back(std::move(e));
        }
    }
    for (int i = d1; i < n; ++i) {
        std::vector<Rational> e(n, Rational(0));
        e[i] = 1;
        l_rows.push_back(std::move(e));
    }
    return {w_rows, l_rows};
}

} // namespace carnot::testing
