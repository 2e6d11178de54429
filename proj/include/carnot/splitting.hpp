#pragma once

#include <utility>
#include <vector>

#include "carnot/algebra.hpp"
#include "carnot/group.hpp"

namespace carnot {

/// Projections onto a pair of complementary homogeneous subgroups, computed by
/// a layer-by-layer triangular solve. At layer a the layer-a coordinate of w·l
/// is w_a + l_a plus product corrections that involve lower layers only, which
/// are already determined; the residual is split linearly by the per-layer
/// matrix P_a : V_a -> V_a∩W along V_a∩L. The solve succeeds for every valid
/// pair, whether or not either factor is normal.
class ComplementProjector {
public:
    ComplementProjector(const StratifiedAlgebra& A, Subspace W, Subspace L)
        : alg_(&A), w_(std::move(W)), l_(std::move(L)) {
        if (!w_.homogeneous() || !l_.homogeneous())
            throw semantic_error("projector: subspaces must be homogeneous");
        if (w_.dim() + l_.dim() != A.dim())
            throw semantic_error("projector: dimensions do not sum to the algebra dimension");
        for (int a = 0; a < A.step(); ++a) {
            const int d = A.layer_dim(a);
            if (w_.layer_dim(a) + l_.layer_dim(a) != d)
                throw semantic_error("projector: layer " + std::to_string(a + 1) +
                                     " is not split by the pair");
            // columns: W_a basis then L_a basis, restricted to layer coordinates
            Mat<Rational> m(d, d);
            int col = 0;
            for (int r = 0; r < w_.layer_dim(a); ++r, ++col)
                for (int i = 0; i < d; ++i)
                    m(i, col) = w_.layer_basis(a)(r, A.layer_offset(a) + i);
            for (int r = 0; r < l_.layer_dim(a); ++r, ++col)
                for (int i = 0; i < d; ++i)
                    m(i, col) = l_.layer_basis(a)(r, A.layer_offset(a) + i);
            auto minv = invert(m);
            if (!minv)
                throw semantic_error("projector: layer " + std::to_string(a + 1) +
                                     " bases intersect");
            // P_a = W_cols · (first w-dim rows of m^-1)
            Mat<Rational> p(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Rational s(0);
                    for (int r = 0; r < w_.layer_dim(a); ++r)
                        s += m(i, r) * (*minv)(r, j);
                    p(i, j) = s;
                }
            proj_.push_back(p);
            proj_d_.push_back(carnot::to_double(p));
        }
    }

    const StratifiedAlgebra& algebra() const { return *alg_; }
    const Subspace& w_space() const { return w_; }
    const Subspace& l_space() const { return l_; }

    /// Unique factors (g_W, g_L) with g = g_W · g_L. Exact for S = Rational.
    template <class S>
    std::pair<PointT<S>, PointT<S>> project(const PointT<S>& g) const {
        const StratifiedAlgebra& A = *alg_;
        if (g.alg != alg_) throw semantic_error("project: point from a different algebra");
        PointT<S> w = identity<S>(A), l = identity<S>(A);
        for (int a = 0; a < A.step(); ++a) {
            const int off = A.layer_offset(a);
            const int d = A.layer_dim(a);
            const PointT<S> m = mul(w, l); // layer-a part collects lower-layer corrections only
            std::vector<S> r(d);
            for (int i = 0; i < d; ++i) r[i] = g.x[off + i] - m.x[off + i];
            for (int i = 0; i < d; ++i) {
                S wa(0);
                for (int j = 0; j < d; ++j) {
                    if constexpr (std::is_same_v<S, double>)
                        wa += proj_d_[a](i, j) * r[j];
                    else
                        wa += S(proj_[a](i, j)) * r[j];
                }
                w.x[off + i] = wa;
                l.x[off + i] = r[i] - wa;
            }
        }
        return {std::move(w), std::move(l)};
    }

private:
    const StratifiedAlgebra* alg_;
    Subspace w_, l_;
    std::vector<Mat<Rational>> proj_;
    std::vector<Mat<double>> proj_d_;
};

/// A validated splitting G = W·L: W a graded subalgebra, L a graded ideal,
/// complementary layer by layer. Construction asserts that W passes the
/// Carnot-subgroup check, which is guaranteed for complements of ideals.
class Splitting {
public:
    Splitting(const StratifiedAlgebra& A, const Subspace& W, const Subspace& L)
        : proj_(A, check_w(A, W), check_l(A, L)) {
        if (W.dim() + L.dim() != A.dim())
            throw semantic_error("splitting: not complementary (dimension failure)");
        Mat<Rational> both = W.rref_basis();
        for (int r = 0; r < L.dim(); ++r) both.append_row(L.rref_basis().row(r));
        if (rank(both) != static_cast<std::size_t>(A.dim()))
            throw semantic_error("splitting: not complementary (intersection failure)");
        if (!is_ideal(A, L)) throw semantic_error("splitting: L is not an ideal");
        if (!check_carnot_subgroup(A, W))
            throw verification_error(
                "splitting: internal inconsistency, complement of an ideal failed the "
                "Carnot-subgroup check");
        k_ = W.homogeneous_dimension();
    }

    const StratifiedAlgebra& algebra() const { return proj_.algebra(); }
    const Subspace& w_space() const { return proj_.w_space(); }
    const Subspace& l_space() const { return proj_.l_space(); }

    /// Homogeneous dimension of W (the Hausdorff dimension of the source).
    int homogeneous_dim_w() const { return k_; }
    int topological_dim_w() const { return proj_.w_space().dim(); }

    template <class S>
    std::pair<PointT<S>, PointT<S>> project(const PointT<S>& g) const {
        return proj_.project(g);
    }

    bool in_w(const Point& g, double tol = 1e-9) const { return w_space().contains(g.x, tol); }
    bool in_w(const RPoint& g) const { return w_space().contains(g.x); }
    bool in_l(const Point& g, double tol = 1e-9) const { return l_space().contains(g.x, tol); }

    /// W-point from graded W-coordinates.
    Point embed_w(const std::vector<double>& coords) const {
        return Point(algebra(), w_space().vector_from_coords(coords));
    }
    std::vector<double> w_coords(const Point& g) const { return w_space().coords_of(g.x); }

    Point embed_l(const std::vector<double>& coords) const {
        return Point(algebra(), l_space().vector_from_coords(coords));
    }
    std::vector<double> l_coords(const Point& g) const { return l_space().coords_of(g.x); }

private:
    static const Subspace& check_w(const StratifiedAlgebra& A, const Subspace& W) {
        if (!is_graded_subalgebra(A, W))
            throw semantic_error("splitting: W is not a graded subalgebra");
        return W;
    }
    static const Subspace& check_l(const StratifiedAlgebra& A, const Subspace& L) {
        if (!is_graded_subalgebra(A, L))
            throw semantic_error("splitting: L is not a graded subalgebra");
        return L;
    }

    ComplementProjector proj_;
    int k_ = 0;
};

inline Splitting make_splitting(const StratifiedAlgebra& A,
                                const std::vector<std::vector<Rational>>& w_rows,
                                const std::vector<std::vector<Rational>>& l_rows) {
    return Splitting(A, Subspace(A, w_rows), Subspace(A, l_rows));
}

struct ProjectionIdentityReport {
    double w_discrepancy = 0;
    double l_discrepancy = 0;
    double max_discrepancy = 0;
};

/// For L normal the projections of q⁻¹·a (a ∈ W) have closed forms:
///   π_W(q⁻¹·a) = q_W⁻¹·a,   π_L(q⁻¹·a) = a⁻¹·q_W·q_L⁻¹·q_W⁻¹·a.
/// Both sides of both identities are evaluated independently (solver vs group
/// words); discrepancies are coordinate-wise relative sup distances.
inline ProjectionIdentityReport verify_normal_projection_identities(const Splitting& s,
                                                                    const Point& q,
                                                                    const Point& a,
                                                                    double membership_tol = 1e-9) {
    if (!s.in_w(a, membership_tol))
        throw semantic_error("verify_normal_projection_identities: a is not in W");
    const auto [qw, ql] = s.project(q);
    const auto [pw, pl] = s.project(mul(inv(q), a));
    const Point rhs_w = mul(inv(qw), a);
    const Point rhs_l = mul(mul(mul(mul(inv(a), qw), inv(ql)), inv(qw)), a);
    ProjectionIdentityReport rep;
    rep.w_discrepancy = coord_distance(pw, rhs_w);
    rep.l_discrepancy = coord_distance(pl, rhs_l);
    rep.max_discrepancy = std::max(rep.w_discrepancy, rep.l_discrepancy);
    return rep;
}

} // namespace carnot
