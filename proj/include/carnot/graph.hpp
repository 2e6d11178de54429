#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "carnot/group.hpp"
#include "carnot/polynomial.hpp"
#include "carnot/splitting.hpp"

namespace carnot {

// ---------------------------------------------------------------------------
// Box domains in W-coordinates
// ---------------------------------------------------------------------------

/// Finite union of closed coordinate boxes over the graded basis of W.
/// Membership is decided exactly; interior points are density points.
class BoxDomain {
public:
    struct Box {
        std::vector<double> lo, hi;
    };

    explicit BoxDomain(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
        if (boxes_.empty()) throw semantic_error("domain needs at least one box");
        for (const auto& b : boxes_) {
            if (b.lo.size() != boxes_.front().lo.size() || b.lo.size() != b.hi.size())
                throw semantic_error("domain boxes have inconsistent dimensions");
            for (std::size_t i = 0; i < b.lo.size(); ++i)
                if (!(b.lo[i] <= b.hi[i])) throw semantic_error("domain box with lo > hi");
        }
    }

    static BoxDomain interval(double lo, double hi) { return BoxDomain({Box{{lo}, {hi}}}); }

    int dim() const { return static_cast<int>(boxes_.front().lo.size()); }
    const std::vector<Box>& boxes() const { return boxes_; }

    bool contains(const std::vector<double>& c) const {
        for (const auto& b : boxes_) {
            bool in = true;
            for (std::size_t i = 0; i < b.lo.size() && in; ++i)
                in = (c[i] >= b.lo[i] && c[i] <= b.hi[i]);
            if (in) return true;
        }
        return false;
    }

    bool interior_contains(const std::vector<double>& c, double margin = 0.0) const {
        for (const auto& b : boxes_) {
            bool in = true;
            for (std::size_t i = 0; i < b.lo.size() && in; ++i)
                in = (c[i] > b.lo[i] + margin && c[i] < b.hi[i] - margin);
            if (in) return true;
        }
        return false;
    }

    /// Uniform sample in coordinate (Haar) measure, boxes weighted by volume.
    std::vector<double> sample(std::mt19937_64& rng) const {
        std::vector<double> vols(boxes_.size(), 0.0);
        double total = 0;
        for (std::size_t k = 0; k < boxes_.size(); ++k) {
            double v = 1;
            for (std::size_t i = 0; i < boxes_[k].lo.size(); ++i)
                v *= std::max(boxes_[k].hi[i] - boxes_[k].lo[i], 0.0);
            vols[k] = v;
            total += v;
        }
        std::size_t pick = 0;
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double t = u(rng);
            while (pick + 1 < boxes_.size() && t >= vols[pick]) t -= vols[pick++];
        } else {
            pick = rng() % boxes_.size();
        }
        const auto& b = boxes_[pick];
        std::vector<double> c(b.lo.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            std::uniform_real_distribution<double> u(b.lo[i], b.hi[i]);
            c[i] = (b.lo[i] == b.hi[i]) ? b.lo[i] : u(rng);
        }
        return c;
    }

    /// Deterministic tensor grid, spacing at most `spacing` per coordinate.
    std::vector<std::vector<double>> grid(double spacing) const {
        std::vector<std::vector<double>> pts;
        for (const auto& b : boxes_) {
            std::vector<std::vector<double>> axes;
            for (std::size_t i = 0; i < b.lo.size(); ++i) {
                const double len = b.hi[i] - b.lo[i];
                const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
                std::vector<double> ax;
                for (int t = 0; t <= steps; ++t) ax.push_back(b.lo[i] + len * t / steps);
                axes.push_back(std::move(ax));
            }
            std::vector<std::size_t> idx(axes.size(), 0);
            for (;;) {
                std::vector<double> c(axes.size());
                for (std::size_t i = 0; i < axes.size(); ++i) c[i] = axes[i][idx[i]];
                pts.push_back(std::move(c));
                std::size_t i = 0;
                while (i < axes.size() && ++idx[i] == axes[i].size()) idx[i++] = 0;
                if (i == axes.size()) break;
            }
        }
        return pts;
    }

private:
    std::vector<Box> boxes_;
};

// ---------------------------------------------------------------------------
// Homogeneous homomorphisms
// ---------------------------------------------------------------------------

/// Expansion of the deeper graded basis rows of W as bracket combinations of
/// (first-layer row, lower-layer row) pairs; exists exactly when the first
/// layer of W generates (W is a Carnot subgroup).
struct BracketGeneration {
    // expansions[r] for graded row r: (first-layer row u, lower row v, coefficient)
    std::vector<std::vector<std::tuple<int, int, double>>> expansions;
};

inline BracketGeneration bracket_generation_table(const Subspace& W) {
    const StratifiedAlgebra& A = W.algebra();
    BracketGeneration tab;
    tab.expansions.resize(W.dim());
    std::vector<int> rows_of_layer_start(A.step() + 1, 0);
    {
        int r = 0;
        for (int a = 0; a < A.step(); ++a) {
            rows_of_layer_start[a] = r;
            r += W.layer_dim(a);
        }
        rows_of_layer_start[A.step()] = r;
    }
    for (int a = 1; a < A.step(); ++a) {
        if (W.layer_dim(a) == 0) continue;
        // columns: brackets [row_u, row_v], u first-layer, v layer a-1
        std::vector<std::pair<int, int>> pairs;
        Mat<Rational> colsT(0, A.dim());
        for (int u = rows_of_layer_start[0]; u < rows_of_layer_start[1]; ++u)
            for (int v = rows_of_layer_start[a - 1]; v < rows_of_layer_start[a]; ++v) {
                pairs.emplace_back(u, v);
                colsT.append_row(
                    A.bracket(W.graded_basis().row(u), W.graded_basis().row(v)));
            }
        // solve colsT^T x = target for each layer-a graded row
        Mat<Rational> m(A.dim(), colsT.rows());
        for (std::size_t j = 0; j < colsT.rows(); ++j)
            for (int i = 0; i < A.dim(); ++i) m(i, j) = colsT(j, i);
        for (int r = rows_of_layer_start[a]; r < rows_of_layer_start[a + 1]; ++r) {
            auto x = solve_consistent(m, W.graded_basis().row(r));
            if (!x)
                throw semantic_error(
                    "first layer of W does not bracket-generate layer " + std::to_string(a + 1) +
                    " (W is not a Carnot subgroup)");
            for (std::size_t t = 0; t < x->size(); ++t)
                if ((*x)[t] != Rational(0))
                    tab.expansions[r].emplace_back(pairs[t].first, pairs[t].second,
                                                   to_double((*x)[t]));
        }
    }
    return tab;
}

/// A graded group homomorphism W -> G in exponential coordinates: a
/// layer-preserving linear map on the Lie algebra, applied to points as a
/// matrix on graded W-coordinates. Commutes with dilations by construction.
class HomogeneousHom {
public:
    HomogeneousHom(Subspace source, Mat<double> cols) : src_(std::move(source)), m_(std::move(cols)) {
        const StratifiedAlgebra& A = src_.algebra();
        if (m_.rows() != static_cast<std::size_t>(A.dim()) ||
            m_.cols() != static_cast<std::size_t>(src_.dim()))
            throw semantic_error("homomorphism matrix has wrong shape");
        // layer preservation: column j supported on the layer of graded row j
        for (std::size_t j = 0; j < m_.cols(); ++j) {
            const int a = src_.graded_layers()[j];
            for (int i = 0; i < A.dim(); ++i)
                if (A.layer_of(i) != a && m_(i, j) != 0.0)
                    throw semantic_error("homomorphism matrix is not layer-preserving");
        }
    }

    const Subspace& source() const { return src_; }
    const StratifiedAlgebra& algebra() const { return src_.algebra(); }
    const Mat<double>& matrix() const { return m_; }

    Point apply_coords(const std::vector<double>& wc) const {
        if (wc.size() != m_.cols()) throw semantic_error("homomorphism: coordinate arity mismatch");
        std::vector<double> v(m_.rows(), 0.0);
        for (std::size_t j = 0; j < m_.cols(); ++j) {
            if (wc[j] == 0.0) continue;
            for (std::size_t i = 0; i < m_.rows(); ++i) v[i] += m_(i, j) * wc[j];
        }
        return Point(algebra(), std::move(v));
    }

    Point apply(const Point& w) const { return apply_coords(src_.coords_of(w.x)); }

    /// Largest violation of bracket respect over graded basis pairs,
    /// relative to the scale of the involved columns.
    double bracket_defect() const {
        const StratifiedAlgebra& A = algebra();
        double worst = 0, scale = 1;
        for (std::size_t i = 0; i < m_.rows(); ++i)
            for (std::size_t j = 0; j < m_.cols(); ++j) scale = std::max(scale, std::abs(m_(i, j)));
        for (int r = 0; r < src_.dim(); ++r)
            for (int t = r + 1; t < src_.dim(); ++t) {
                const auto br = A.bracket(src_.graded_basis().row(r), src_.graded_basis().row(t));
                if (!src_.contains(br)) return std::numeric_limits<double>::infinity();
                std::vector<double> brd(br.size());
                for (std::size_t i = 0; i < br.size(); ++i) brd[i] = to_double(br[i]);
                const Point lhs = apply_coords(src_.coords_of(brd));
                std::vector<double> cr(m_.rows()), ct(m_.rows());
                for (std::size_t i = 0; i < m_.rows(); ++i) {
                    cr[i] = m_(i, r);
                    ct[i] = m_(i, t);
                }
                const auto rhs = A.bracket(cr, ct);
                for (std::size_t i = 0; i < rhs.size(); ++i)
                    worst = std::max(worst, std::abs(lhs.x[i] - rhs[i]));
            }
        return worst / (scale * scale);
    }

    HomogeneousHom precompose_dilation(double lambda) const {
        if (lambda <= 0) throw semantic_error("dilation factor must be positive");
        Mat<double> m = m_;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double f = std::pow(lambda, src_.graded_layers()[j] + 1);
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) *= f;
        }
        return HomogeneousHom(src_, std::move(m));
    }

    static HomogeneousHom identity_embedding(const Subspace& W) {
        Mat<double> m(W.algebra().dim(), W.dim());
        for (int j = 0; j < W.dim(); ++j)
            for (int i = 0; i < W.algebra().dim(); ++i) m(i, j) = W.graded_basis_d()(j, i);
        return HomogeneousHom(W, std::move(m));
    }

    /// Extend first-layer images to all of W along the bracket-generation
    /// table. `first_cols` holds one n-vector column per first-layer row of W.
    static HomogeneousHom from_first_layer(const Subspace& W, const Mat<double>& first_cols) {
        const StratifiedAlgebra& A = W.algebra();
        const int m1 = W.layer_dim(0);
        if (first_cols.rows() != static_cast<std::size_t>(A.dim()) ||
            first_cols.cols() != static_cast<std::size_t>(m1))
            throw semantic_error("from_first_layer: need one column per first-layer basis row");
        const auto tab = bracket_generation_table(W);
        Mat<double> m(A.dim(), W.dim());
        for (int j = 0; j < m1; ++j)
            for (int i = 0; i < A.dim(); ++i) m(i, j) = first_cols(i, j);
        for (int r = m1; r < W.dim(); ++r) {
            std::vector<double> col(A.dim(), 0.0);
            for (const auto& [u, v, coef] : tab.expansions[r]) {
                std::vector<double> cu(A.dim()), cv(A.dim());
                for (int i = 0; i < A.dim(); ++i) {
                    cu[i] = m(i, u);
                    cv[i] = m(i, v);
                }
                const auto br = A.bracket(cu, cv);
                for (int i = 0; i < A.dim(); ++i) col[i] += coef * br[i];
            }
            for (int i = 0; i < A.dim(); ++i) m(i, r) = col[i];
        }
        return HomogeneousHom(W, std::move(m));
    }

private:
    Subspace src_;
    Mat<double> m_;
};

/// Group-level homomorphism and dilation-equivariance defect on random
/// W-samples, in the coordinate-wise relative gauge; the graph of an
/// intrinsically linear map must keep this at rounding level (its image is
/// then a homogeneous subgroup).
inline double homomorphism_defect(const HomogeneousHom& H, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int m = H.source().dim();
    auto rand_pt = [&] {
        std::vector<double> c(m);
        for (auto& v : c) v = uni(rng);
        return Point(H.algebra(), H.source().vector_from_coords(c));
    };
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        const Point a = rand_pt(), b = rand_pt();
        worst = std::max(worst, coord_distance(mul(H.apply(a), H.apply(b)), H.apply(mul(a, b))));
        const double lam = std::exp(uni(rng)); // factors in [1/e, e]
        worst = std::max(worst, coord_distance(dilate(lam, H.apply(a)), H.apply(dilate(lam, a))));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Intrinsically linear maps
// ---------------------------------------------------------------------------

/// A map ℓ : W -> L whose intrinsic graph is a homogeneous subgroup, stored
/// through its graph homomorphism H(w) = w·ℓ(w) with π_W∘H = id.
class IntrinsicLinearMap {
public:
    IntrinsicLinearMap(const Splitting& s, HomogeneousHom h, double proj_tol = 1e-9,
                       double bracket_tol = 1e-9)
        : split_(&s), hom_(std::move(h)) {
        if (!hom_.source().same_span(s.w_space()))
            throw semantic_error("intrinsically linear map: source must be W");
        const double defect = projection_identity_defect(s, hom_);
        if (defect > proj_tol)
            throw verification_error("graph map does not project back to the identity on W (defect " +
                                     std::to_string(defect) + ")");
        // the graph is a subgroup only if the graph map respects brackets;
        // e.g. a non-symmetric first-layer component on a horizontal plane
        // fails here even though it projects back to the identity
        const double bdef = hom_.bracket_defect();
        if (!(bdef <= bracket_tol))
            throw verification_error("graph map does not respect brackets (defect " +
                                     std::to_string(bdef) + ")");
    }

    /// Build from the first-layer component: theta(u_i) = sum_j theta[i][j] l_j
    /// with u_i the first-layer rows of W and l_j the first-layer rows of L.
    static IntrinsicLinearMap from_first_layer(const Splitting& s, const Mat<double>& theta) {
        const StratifiedAlgebra& A = s.algebra();
        const int m1 = s.w_space().layer_dim(0);
        const int l1 = s.l_space().layer_dim(0);
        if (theta.rows() != static_cast<std::size_t>(m1) ||
            theta.cols() != static_cast<std::size_t>(l1))
            throw semantic_error("first-layer component matrix must be dim(W_1) x dim(L_1)");
        Mat<double> cols(A.dim(), m1);
        for (int u = 0; u < m1; ++u) {
            for (int i = 0; i < A.dim(); ++i) cols(i, u) = s.w_space().graded_basis_d()(u, i);
            for (int j = 0; j < l1; ++j) {
                const double f = theta(u, j);
                if (f == 0.0) continue;
                for (int i = 0; i < A.dim(); ++i)
                    cols(i, u) += f * s.l_space().graded_basis_d()(j, i);
            }
        }
        return IntrinsicLinearMap(s, HomogeneousHom::from_first_layer(s.w_space(), cols));
    }

    const Splitting& splitting() const { return *split_; }
    const HomogeneousHom& hom() const { return hom_; }

    /// ℓ(w) = w⁻¹·H(w) ∈ L.
    Point value(const Point& w) const { return mul(inv(w), hom_.apply(w)); }

    /// sup over probe points of |π_W(H(w))⁻¹·w| relative to |w|.
    static double projection_identity_defect(const Splitting& s, const HomogeneousHom& h) {
        double worst = 0;
        const int m = s.w_space().dim();
        std::vector<std::vector<double>> probes;
        for (int j = 0; j < m; ++j) {
            std::vector<double> c(m, 0.0);
            c[j] = 1.0;
            probes.push_back(c);
        }
        probes.push_back(std::vector<double>(m, 1.0));
        std::vector<double> alt(m);
        for (int j = 0; j < m; ++j) alt[j] = (j % 2 ? -0.5 : 1.5);
        probes.push_back(alt);
        for (const auto& c : probes) {
            const Point w(s.algebra(), s.w_space().vector_from_coords(c));
            const auto [pw, pl] = s.project(h.apply(w));
            worst = std::max(worst, coord_distance(pw, w));
        }
        return worst;
    }

private:
    const Splitting* split_;
    HomogeneousHom hom_;
};

/// ℓ -> graph homomorphism, revalidating bracket respect.
inline HomogeneousHom hom_from_linear(const IntrinsicLinearMap& l, double tol = 1e-9) {
    const double d = l.hom().bracket_defect();
    if (!(d <= tol))
        throw verification_error("graph map fails the bracket-respect check (defect " +
                                 std::to_string(d) + ")");
    return l.hom();
}

/// Graph homomorphism -> ℓ, requiring π_W∘H = id within tol.
inline IntrinsicLinearMap linear_from_hom(const Splitting& s, const HomogeneousHom& h,
                                          double tol = 1e-9) {
    return IntrinsicLinearMap(s, h, tol);
}

// ---------------------------------------------------------------------------
// Graph functions
// ---------------------------------------------------------------------------

/// φ : U ⊆ W -> L with its intrinsic graph map Φ(w) = w·φ(w). The rule is a
/// polynomial coordinate map, an intrinsically linear map, a finite sample
/// table (nearest-sample lookup, not differentiable), or an opaque callable.
/// Domains are box unions in W-coordinates; translated copies keep membership
/// through the translating element instead of a box list.
class GraphFunction {
public:
    using Rule = std::function<Point(const Point&)>;

    GraphFunction(const Splitting& s, BoxDomain dom, Rule rule, bool differentiable = true)
        : split_(&s), box_(std::move(dom)), rule_(std::move(rule)), differentiable_(differentiable) {
        if (box_->dim() != s.topological_dim_w())
            throw semantic_error("domain dimension does not match dim W");
    }

    /// One polynomial per L graded coordinate, in the W graded coordinates.
    static GraphFunction poly(const Splitting& s, BoxDomain dom, std::vector<Polynomial> coord_rules) {
        if (static_cast<int>(coord_rules.size()) != s.l_space().dim())
            throw semantic_error("need one polynomial per L coordinate");
        for (const auto& p : coord_rules)
            if (p.nvars() != s.topological_dim_w())
                throw semantic_error("polynomial arity must equal dim W");
        const Splitting* sp = &s;
        Rule r = [sp, rules = std::move(coord_rules)](const Point& w) {
            const auto wc = sp->w_coords(w);
            std::vector<double> lc(rules.size());
            for (std::size_t i = 0; i < rules.size(); ++i) lc[i] = rules[i].eval(wc);
            return sp->embed_l(lc);
        };
        return GraphFunction(s, std::move(dom), std::move(r));
    }

    static GraphFunction constant(const Splitting& s, BoxDomain dom, Point l_value) {
        if (!s.in_l(l_value)) throw semantic_error("constant value must lie in L");
        Rule r = [v = std::move(l_value)](const Point&) { return v; };
        return GraphFunction(s, std::move(dom), std::move(r));
    }

    static GraphFunction intrinsic_linear(const Splitting& s, BoxDomain dom, IntrinsicLinearMap l) {
        Rule r = [l = std::move(l)](const Point& w) { return l.value(w); };
        return GraphFunction(s, std::move(dom), std::move(r));
    }

    /// Nearest-sample table in W-coordinates (Euclidean nearest). Good enough
    /// for Lipschitz-constant estimation; never differentiated.
    static GraphFunction sample_table(const Splitting& s, BoxDomain dom,
                                      std::vector<std::pair<std::vector<double>, std::vector<double>>> wl) {
        if (wl.empty()) throw semantic_error("sample table is empty");
        const Splitting* sp = &s;
        Rule r = [sp, tab = std::move(wl)](const Point& w) {
            const auto wc = sp->w_coords(w);
            double best = std::numeric_limits<double>::infinity();
            const std::vector<double>* bestl = nullptr;
            for (const auto& [twc, tlc] : tab) {
                double d2 = 0;
                for (std::size_t i = 0; i < twc.size(); ++i)
                    d2 += (twc[i] - wc[i]) * (twc[i] - wc[i]);
                if (d2 < best) {
                    best = d2;
                    bestl = &tlc;
                }
            }
            return sp->embed_l(*bestl);
        };
        return GraphFunction(s, std::move(dom), std::move(r), /*differentiable=*/false);
    }

    const Splitting& splitting() const { return *split_; }
    bool differentiable_rule() const { return differentiable_; }

    bool in_domain(const Point& w) const {
        if (translated_membership_) return translated_membership_(w);
        return box_->contains(split_->w_coords(w));
    }

    bool interior_point(const Point& w, double margin = 0.0) const {
        if (translated_membership_) return translated_membership_(w); // translated: membership only
        return box_->interior_contains(split_->w_coords(w), margin);
    }

    /// φ(w); validated to land in L. No domain check (rules are total maps).
    Point eval(const Point& w) const {
        Point v = rule_(w);
        if (!split_->in_l(v, 1e-6))
            throw verification_error("graph rule produced a value outside L");
        return v;
    }

    /// Φ(w) = w·φ(w); requires w ∈ U.
    Point graph_map(const Point& w) const {
        if (!in_domain(w)) throw semantic_error("graph_map: point outside the domain");
        return mul(w, eval(w));
    }

    /// Uniform domain sample as a W-point.
    Point sample_domain(std::mt19937_64& rng) const {
        if (translated_sampler_) return translated_sampler_(rng);
        return split_->embed_w(box_->sample(rng));
    }

    /// Deterministic grid of domain points (W-coordinate spacing).
    std::vector<Point> domain_grid(double spacing) const {
        std::vector<Point> pts;
        if (translated_grid_) return translated_grid_(spacing);
        for (const auto& c : box_->grid(spacing)) pts.push_back(split_->embed_w(c));
        return pts;
    }

    /// Box description, absent for translated domains.
    const BoxDomain* box_domain() const { return translated_membership_ ? nullptr : &*box_; }

    friend GraphFunction translate(const GraphFunction& phi, const Point& q, bool verify,
                                   double verify_tol);

private:
    const Splitting* split_;
    std::optional<BoxDomain> box_;
    Rule rule_;
    bool differentiable_;
    std::function<bool(const Point&)> translated_membership_;
    std::function<Point(std::mt19937_64&)> translated_sampler_;
    std::function<std::vector<Point>(double)> translated_grid_;
};

/// Intrinsic translation φ_q: the function whose graph is q·graph(φ). With L
/// normal the closed form is
///   φ_q(a) = a⁻¹·q_W·q_L·q_W⁻¹·a · φ(q_W⁻¹·a),   U_q = q_W·U.
/// With verify=true every evaluation also runs the definition through the
/// projections, (π_L(q⁻¹·a))⁻¹·φ(π_W(q⁻¹·a)), and insists they agree.
inline GraphFunction translate(const GraphFunction& phi, const Point& q, bool verify = false,
                               double verify_tol = 1e-9) {
    const Splitting* sp = &phi.splitting();
    const auto [qw, ql] = sp->project(q);
    const Point core = mul(mul(qw, ql), inv(qw));
    const Point qw_inv = inv(qw);
    auto base = std::make_shared<const GraphFunction>(phi);
    const Point q_copy = q;

    GraphFunction::Rule rule = [base, core, qw_inv, q_copy, verify, verify_tol, sp](const Point& a) {
        const Point u = mul(qw_inv, a);
        const Point fast = mul(mul(mul(inv(a), core), a), base->eval(u));
        if (verify) {
            const auto [pw, pl] = sp->project(mul(inv(q_copy), a));
            const Point generic = mul(inv(pl), base->eval(pw));
            const double d = coord_distance(fast, generic);
            if (!(d <= verify_tol))
                throw verification_error("translated rule disagrees with the projection form by " +
                                         std::to_string(d));
        }
        return fast;
    };

    // domain q_W·U, kept as membership / sampling through q_W
    const int dw = sp->topological_dim_w();
    BoxDomain dummy = base->box_domain()
                          ? *base->box_domain()
                          : BoxDomain({BoxDomain::Box{std::vector<double>(dw, 0.0),
                                                      std::vector<double>(dw, 0.0)}});
    const Splitting& s = *sp;
    GraphFunction out(s, std::move(dummy), std::move(rule), phi.differentiable_rule());
    const Point qw_copy = qw;
    out.translated_membership_ = [base, qw_inv](const Point& a) {
        return base->in_domain(mul(qw_inv, a));
    };
    out.translated_sampler_ = [base, qw_copy](std::mt19937_64& rng) {
        return mul(qw_copy, base->sample_domain(rng));
    };
    out.translated_grid_ = [base, qw_copy](double spacing) {
        auto pts = base->domain_grid(spacing);
        for (auto& p : pts) p = mul(qw_copy, p);
        return pts;
    };
    return out;
}

// ---------------------------------------------------------------------------
// Intrinsic Lipschitz estimation
// ---------------------------------------------------------------------------

struct LipConstantEstimate {
    double value = 0;
    int pairs_used = 0;
    int pairs_skipped = 0;
};

/// L̂ = max over pairs of |π_L(Φ(w)⁻¹Φ(w'))| / |π_W(Φ(w)⁻¹Φ(w'))|, skipping
/// pairs whose denominator vanishes. Monotone in the pair set by construction.
inline LipConstantEstimate intrinsic_lip_constant(const GraphFunction& phi,
                                                  const std::vector<std::pair<Point, Point>>& pairs,
                                                  const HomogeneousNorm& norm = {}) {
    if (pairs.size() < 1) throw semantic_error("intrinsic_lip_constant: need at least one pair");
    LipConstantEstimate est;
    for (const auto& [w, wp] : pairs) {
        const Point d = mul(inv(phi.graph_map(w)), phi.graph_map(wp));
        const auto [pw, pl] = phi.splitting().project(d);
        const double den = norm(pw);
        if (den <= 1e-14 * std::max(1.0, norm(d))) {
            ++est.pairs_skipped;
            continue;
        }
        est.value = std::max(est.value, norm(pl) / den);
        ++est.pairs_used;
    }
    if (est.pairs_used == 0)
        throw semantic_error("intrinsic_lip_constant: all sample pairs are degenerate");
    return est;
}

/// Seeded helper producing domain sample pairs for the estimator.
inline std::vector<std::pair<Point, Point>> make_sample_pairs(const GraphFunction& phi, int count,
                                                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<Point, Point>> pairs;
    pairs.reserve(count);
    for (int i = 0; i < count; ++i)
        pairs.emplace_back(phi.sample_domain(rng), phi.sample_domain(rng));
    return pairs;
}

} // namespace carnot
