#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/linalg.hpp"
#include "carnot/rational.hpp"

namespace carnot {

/// One structure constant c[i][j][k], 1-based basis indices as in group files:
/// [X_i, X_j] has coefficient c on X_k.
struct StructureEntry {
    int i, j, k;
    Rational c;
};

/// A stratified Lie algebra given by exact structure constants on a fixed
/// graded basis X_1..X_n ordered by layer. The basis index range of layer a
/// (1-based) is [layer_offset(a), layer_offset(a)+layer_dim(a)).
///
/// Construction stores the constants as given; run validate_algebra() to
/// decide antisymmetry / Jacobi / grading / stratification. The step is capped
/// at 4 because the group product uses closed-form series coefficients that
/// are exact through step 4.
class StratifiedAlgebra {
public:
    static constexpr int kMaxStep = 4;

    struct Nonzero {
        int i, j, k;
        Rational c;
        double cd;
    };

    /// Normal path: entries are closed antisymmetrically (c[j][i][k] = -c);
    /// giving both (i,j,k) and (j,i,k) inconsistently is an error.
    StratifiedAlgebra(std::string name, std::vector<int> layer_dims,
                      const std::vector<StructureEntry>& brackets)
        : StratifiedAlgebra(std::move(name), std::move(layer_dims)) {
        for (const auto& e : brackets) {
            check_index(e.i);
            check_index(e.j);
            check_index(e.k);
            set_c(e.i - 1, e.j - 1, e.k - 1, e.c);
            const Rational neg = -e.c;
            const Rational& cur = c(e.j - 1, e.i - 1, e.k - 1);
            if (cur != Rational(0) && cur != neg)
                throw semantic_error("conflicting structure constants at (" + std::to_string(e.j) +
                                     "," + std::to_string(e.i) + "," + std::to_string(e.k) + ")");
            set_c(e.j - 1, e.i - 1, e.k - 1, neg);
        }
        finalize();
    }

    /// Raw path: constants taken verbatim (no antisymmetric closure), so that
    /// broken tables can be constructed and then diagnosed by validate_algebra.
    static StratifiedAlgebra from_raw_constants(std::string name, std::vector<int> layer_dims,
                                                const std::vector<StructureEntry>& entries) {
        StratifiedAlgebra a(std::move(name), std::move(layer_dims));
        for (const auto& e : entries) {
            a.check_index(e.i);
            a.check_index(e.j);
            a.check_index(e.k);
            a.set_c(e.i - 1, e.j - 1, e.k - 1, e.c);
        }
        a.finalize();
        return a;
    }

    const std::string& name() const { return name_; }
    int dim() const { return n_; }
    int step() const { return static_cast<int>(layer_dims_.size()); }
    const std::vector<int>& layer_dims() const { return layer_dims_; }
    int layer_dim(int a) const { return layer_dims_.at(a); }

    /// 0-based layer of 0-based basis index i.
    int layer_of(int i) const { return layer_of_.at(i); }
    /// First 0-based basis index of 0-based layer a.
    int layer_offset(int a) const { return offsets_.at(a); }
    /// Dilation weight of basis index i (= layer + 1).
    int weight(int i) const { return layer_of(i) + 1; }

    /// Homogeneous dimension Q = sum_a a * dim V_a.
    int homogeneous_dimension() const {
        int q = 0;
        for (int a = 0; a < step(); ++a) q += (a + 1) * layer_dims_[a];
        return q;
    }

    const Rational& c(int i, int j, int k) const { return c_[idx(i, j, k)]; }
    const std::vector<Nonzero>& nonzeros() const { return nz_; }

    /// Bilinear extension of the structure constants. Exact for S = Rational.
    template <class S>
    std::vector<S> bracket(const std::vector<S>& x, const std::vector<S>& y) const {
        if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
            throw semantic_error("bracket: vector length mismatch");
        std::vector<S> out(n_, S(0));
        for (const auto& e : nz_) {
            const S t = x[e.i] * y[e.j];
            if constexpr (std::is_same_v<S, double>) {
                out[e.k] += t * e.cd;
            } else {
                out[e.k] += t * S(e.c);
            }
        }
        return out;
    }

    /// Bracket of two basis vectors as a coordinate vector.
    std::vector<Rational> basis_bracket(int i, int j) const {
        std::vector<Rational> out(n_, Rational(0));
        for (int k = 0; k < n_; ++k) out[k] = c(i, j, k);
        return out;
    }

private:
    StratifiedAlgebra(std::string name, std::vector<int> layer_dims)
        : name_(std::move(name)), layer_dims_(std::move(layer_dims)) {
        if (layer_dims_.empty()) throw semantic_error("algebra needs at least one layer");
        if (static_cast<int>(layer_dims_.size()) > kMaxStep)
            throw semantic_error("step " + std::to_string(layer_dims_.size()) +
                                 " exceeds the supported cap of " + std::to_string(kMaxStep));
        for (int d : layer_dims_)
            if (d <= 0) throw semantic_error("layer dimensions must be positive");
        n_ = std::accumulate(layer_dims_.begin(), layer_dims_.end(), 0);
        offsets_.resize(layer_dims_.size());
        int off = 0;
        for (std::size_t a = 0; a < layer_dims_.size(); ++a) {
            offsets_[a] = off;
            off += layer_dims_[a];
        }
        layer_of_.resize(n_);
        for (int a = 0, i = 0; a < static_cast<int>(layer_dims_.size()); ++a)
            for (int d = 0; d < layer_dims_[a]; ++d) layer_of_[i++] = a;
        c_.assign(static_cast<std::size_t>(n_) * n_ * n_, Rational(0));
    }

    void check_index(int i1) const {
        if (i1 < 1 || i1 > n_)
            throw semantic_error("basis index " + std::to_string(i1) + " out of range 1.." +
                                 std::to_string(n_));
    }

    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }

    void set_c(int i, int j, int k, const Rational& v) { c_[idx(i, j, k)] = v; }

    void finalize() {
        nz_.clear();
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    if (c(i, j, k) != Rational(0))
                        nz_.push_back({i, j, k, c(i, j, k), to_double(c(i, j, k))});
    }

    std::string name_;
    std::vector<int> layer_dims_;
    int n_ = 0;
    std::vector<int> offsets_;
    std::vector<int> layer_of_;
    std::vector<Rational> c_;
    std::vector<Nonzero> nz_;
};

// ---------------------------------------------------------------------------
// Axiom validation
// ---------------------------------------------------------------------------

struct AxiomViolation {
    enum class Kind { antisymmetry, jacobi, grading, stratification };
    Kind kind;
    std::array<int, 3> witness; // 1-based basis indices; layer index for stratification
    std::string detail;
};

struct ValidationReport {
    std::vector<AxiomViolation> violations;
    bool ok() const { return violations.empty(); }
};

inline const char* axiom_name(AxiomViolation::Kind k) {
    switch (k) {
        case AxiomViolation::Kind::antisymmetry: return "antisymmetry";
        case AxiomViolation::Kind::jacobi: return "jacobi";
        case AxiomViolation::Kind::grading: return "grading";
        case AxiomViolation::Kind::stratification: return "stratification";
    }
    return "?";
}

/// Check the four stratification axioms exactly; the report lists every failed
/// axiom with a witness (first offending basis triple, or offending layer).
inline ValidationReport validate_algebra(const StratifiedAlgebra& A) {
    ValidationReport rep;
    const int n = A.dim();
    const int s = A.step();

    // antisymmetry: c[i][j][k] == -c[j][i][k] (covers c[i][i][k] == 0)
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (A.c(i, j, k) != -A.c(j, i, k)) {
                    rep.violations.push_back({AxiomViolation::Kind::antisymmetry,
                                              {i + 1, j + 1, k + 1},
                                              "c[i][j][k] != -c[j][i][k]"});
                    goto antisym_done;
                }
antisym_done:;

    // grading: nonzero c[i][j][k] forces layer(k) = layer(i)+layer(j); brackets
    // past the top layer must vanish.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int ab = A.layer_of(i) + A.layer_of(j) + 1; // 0-based target layer
            for (int k = 0; k < n; ++k) {
                if (A.c(i, j, k) == Rational(0)) continue;
                if (ab >= s || A.layer_of(k) != ab) {
                    rep.violations.push_back({AxiomViolation::Kind::grading,
                                              {i + 1, j + 1, k + 1},
                                              "bracket leaves its graded target layer"});
                    goto grading_done;
                }
            }
        }
grading_done:;

    // Jacobi on all basis triples: [Xi,[Xj,Xk]] + [Xj,[Xk,Xi]] + [Xk,[Xi,Xj]] = 0
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                auto ei = std::vector<Rational>(n, Rational(0));
                auto ej = ei, ek = ei;
                ei[i] = 1;
                ej[j] = 1;
                ek[k] = 1;
                auto t1 = A.bracket(ei, A.bracket(ej, ek));
                auto t2 = A.bracket(ej, A.bracket(ek, ei));
                auto t3 = A.bracket(ek, A.bracket(ei, ej));
                for (int m = 0; m < n; ++m) t1[m] += t2[m] + t3[m];
                if (!is_zero_vector(t1)) {
                    rep.violations.push_back({AxiomViolation::Kind::jacobi,
                                              {i + 1, j + 1, k + 1},
                                              "Jacobi identity fails"});
                    goto jacobi_done;
                }
            }
jacobi_done:;

    // stratification: span{ [X_i, X_j] : i in layer 1, j in layer a } = V_{a+1}
    for (int a = 0; a + 1 < s; ++a) {
        Mat<Rational> br(0, n);
        for (int i = A.layer_offset(0); i < A.layer_offset(0) + A.layer_dim(0); ++i)
            for (int j = A.layer_offset(a); j < A.layer_offset(a) + A.layer_dim(a); ++j)
                br.append_row(A.basis_bracket(i, j));
        // inclusion in V_{a+1} is already enforced by the grading check; here
        // the span must reach the full layer dimension.
        if (static_cast<int>(rank(br)) != A.layer_dim(a + 1)) {
            rep.violations.push_back({AxiomViolation::Kind::stratification,
                                      {a + 2, -1, -1},
                                      "[V_1, V_" + std::to_string(a + 1) +
                                          "] does not span V_" + std::to_string(a + 2)});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Subspaces
// ---------------------------------------------------------------------------

/// A linear subspace of the algebra, canonicalized to reduced row-echelon form
/// so subspace equality is a syntactic check. When the subspace is homogeneous
/// (equals the direct sum of its layer intersections) a graded basis is
/// available: per-layer RREF bases concatenated in layer order.
class Subspace {
public:
    Subspace(const StratifiedAlgebra& A, const std::vector<std::vector<Rational>>& basis_rows)
        : alg_(&A) {
        for (const auto& r : basis_rows)
            if (static_cast<int>(r.size()) != A.dim())
                throw semantic_error("subspace basis row has wrong length");
        Mat<Rational> m = Mat<Rational>::from_rows(basis_rows);
        if (m.cols() == 0) m = Mat<Rational>(0, A.dim());
        rref_ = m;
        pivots_ = rref(rref_);
        if (pivots_.size() != basis_rows.size())
            throw semantic_error("subspace basis rows are linearly dependent");
        rref_ = nonzero_rows(rref_);
        rref_d_ = to_double(rref_);
        compute_layer_split();
    }

    static Subspace zero(const StratifiedAlgebra& A) { return Subspace(A, {}); }

    /// Span of selected basis vectors, 1-based indices.
    static Subspace span_of_basis(const StratifiedAlgebra& A, const std::vector<int>& idx1) {
        std::vector<std::vector<Rational>> rows;
        for (int i : idx1) {
            if (i < 1 || i > A.dim()) throw semantic_error("basis index out of range");
            std::vector<Rational> r(A.dim(), Rational(0));
            r[i - 1] = 1;
            rows.push_back(std::move(r));
        }
        return Subspace(A, rows);
    }

    const StratifiedAlgebra& algebra() const { return *alg_; }
    int dim() const { return static_cast<int>(rref_.rows()); }
    bool homogeneous() const { return homogeneous_; }

    const Mat<Rational>& rref_basis() const { return rref_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    /// dim(S ∩ V_a), 0-based layer.
    int layer_dim(int a) const { return static_cast<int>(layer_bases_[a].rows()); }
    const Mat<Rational>& layer_basis(int a) const { return layer_bases_[a]; }

    /// Homogeneous dimension of the subspace: sum_a a·dim(S ∩ V_a).
    /// Only meaningful for homogeneous subspaces.
    int homogeneous_dimension() const {
        require_homogeneous();
        int q = 0;
        for (int a = 0; a < alg_->step(); ++a) q += (a + 1) * layer_dim(a);
        return q;
    }

    /// Per-layer RREF bases concatenated in layer order. Rows of layer a are
    /// supported on layer-a coordinates only.
    const Mat<Rational>& graded_basis() const {
        require_homogeneous();
        return graded_;
    }
    /// 0-based layer of each graded-basis row.
    const std::vector<int>& graded_layers() const {
        require_homogeneous();
        return graded_layers_;
    }
    const std::vector<std::size_t>& graded_pivots() const {
        require_homogeneous();
        return graded_pivots_;
    }
    const Mat<double>& graded_basis_d() const {
        require_homogeneous();
        return graded_d_;
    }

    bool contains(const std::vector<Rational>& v) const {
        return is_zero_vector(reduce_against_rref(rref_, pivots_, v));
    }

    /// Float membership: sup-norm of the reduction remainder relative to
    /// max(1, |v|_inf) must not exceed tol.
    bool contains(const std::vector<double>& v, double tol = 1e-9) const {
        std::vector<double> r = v;
        double scale = 1.0;
        for (double x : v) scale = std::max(scale, std::abs(x));
        for (std::size_t i = 0; i < pivots_.size(); ++i) {
            const double f = r[pivots_[i]];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < rref_d_.cols(); ++j) r[j] -= f * rref_d_(i, j);
        }
        for (double x : r)
            if (std::abs(x) > tol * scale) return false;
        return true;
    }

    /// Graded-basis coordinates of a vector in the span. The graded basis is
    /// in per-layer RREF, so the coordinate of row r is just v[pivot_r].
    std::vector<double> coords_of(const std::vector<double>& v) const {
        require_homogeneous();
        std::vector<double> c(graded_pivots_.size());
        for (std::size_t r = 0; r < graded_pivots_.size(); ++r) c[r] = v[graded_pivots_[r]];
        return c;
    }
    std::vector<Rational> coords_of(const std::vector<Rational>& v) const {
        require_homogeneous();
        std::vector<Rational> c(graded_pivots_.size());
        for (std::size_t r = 0; r < graded_pivots_.size(); ++r) c[r] = v[graded_pivots_[r]];
        return c;
    }

    /// Vector with the given graded-basis coordinates.
    template <class S>
    std::vector<S> vector_from_coords(const std::vector<S>& c) const {
        require_homogeneous();
        if (c.size() != graded_pivots_.size()) throw semantic_error("coords length mismatch");
        std::vector<S> v(alg_->dim(), S(0));
        for (std::size_t r = 0; r < c.size(); ++r)
            for (int j = 0; j < alg_->dim(); ++j) {
                if constexpr (std::is_same_v<S, double>)
                    v[j] += c[r] * graded_d_(r, j);
                else
                    v[j] += c[r] * S(graded_(r, j));
            }
        return v;
    }

    bool same_span(const Subspace& o) const { return rref_ == o.rref_; }

private:
    void require_homogeneous() const {
        if (!homogeneous_) throw semantic_error("subspace is not homogeneous");
    }

    void compute_layer_split() {
        const int n = alg_->dim();
        const int s = alg_->step();
        layer_bases_.assign(s, Mat<Rational>(0, n));
        // S ∩ V_a: combinations of basis rows vanishing outside layer a.
        for (int a = 0; a < s; ++a) {
            if (dim() == 0) continue;
            // combinations c with sum_r c_r basis_r vanishing outside layer a
            Mat<Rational> outside(0, dim());
            for (int j = 0; j < n; ++j) {
                if (alg_->layer_of(j) == a) continue;
                std::vector<Rational> col(dim());
                for (int r = 0; r < dim(); ++r) col[r] = rref_(r, j);
                outside.append_row(col);
            }
            Mat<Rational> ker = kernel(outside);
            for (std::size_t t = 0; t < ker.rows(); ++t) {
                std::vector<Rational> v(n, Rational(0));
                for (int r = 0; r < dim(); ++r)
                    for (int j = 0; j < n; ++j) v[j] += ker(t, r) * rref_(r, j);
                layer_bases_[a].append_row(v);
            }
            auto piv = rref(layer_bases_[a]);
            (void)piv;
            layer_bases_[a] = nonzero_rows(layer_bases_[a]);
        }
        int total = 0;
        for (int a = 0; a < s; ++a) total += layer_dim(a);
        homogeneous_ = (total == dim());
        if (homogeneous_) {
            graded_ = Mat<Rational>(0, n);
            graded_layers_.clear();
            for (int a = 0; a < s; ++a)
                for (std::size_t r = 0; r < layer_bases_[a].rows(); ++r) {
                    graded_.append_row(layer_bases_[a].row(r));
                    graded_layers_.push_back(a);
                }
            Mat<Rational> g = graded_;
            graded_pivots_ = rref(g); // graded_ is already per-layer RREF; pivots in order
            graded_d_ = to_double(graded_);
        }
    }

    const StratifiedAlgebra* alg_;
    Mat<Rational> rref_;
    Mat<double> rref_d_;
    std::vector<std::size_t> pivots_;
    std::vector<Mat<Rational>> layer_bases_;
    bool homogeneous_ = false;
    Mat<Rational> graded_;
    Mat<double> graded_d_;
    std::vector<int> graded_layers_;
    std::vector<std::size_t> graded_pivots_;
};

// ---------------------------------------------------------------------------
// Subalgebra / ideal / Carnot-subgroup predicates (all exact)
// ---------------------------------------------------------------------------

/// true iff [X_i, v] ∈ S for every algebra basis vector X_i and basis v of S.
inline bool is_ideal(const StratifiedAlgebra& A, const Subspace& S) {
    for (int i = 0; i < A.dim(); ++i) {
        std::vector<Rational> ei(A.dim(), Rational(0));
        ei[i] = 1;
        for (int r = 0; r < S.dim(); ++r) {
            if (!S.contains(A.bracket(ei, S.rref_basis().row(r)))) return false;
        }
    }
    return true;
}

/// true iff S is homogeneous (layer-split) and closed under the bracket.
inline bool is_graded_subalgebra(const StratifiedAlgebra& A, const Subspace& S) {
    if (!S.homogeneous()) return false;
    for (int r = 0; r < S.dim(); ++r)
        for (int t = r + 1; t < S.dim(); ++t)
            if (!S.contains(A.bracket(S.rref_basis().row(r), S.rref_basis().row(t)))) return false;
    return true;
}

/// Carnot-subgroup test: the first inherited layer must regenerate every
/// deeper layer, i.e. span[W_1, W_a] = W_{a+1} for all a (exact rank check).
/// Precondition: W is a graded subalgebra.
inline bool check_carnot_subgroup(const StratifiedAlgebra& A, const Subspace& W) {
    if (!is_graded_subalgebra(A, W)) throw semantic_error("check_carnot_subgroup: not a graded subalgebra");
    for (int a = 0; a + 1 < A.step(); ++a) {
        const int target_dim = W.layer_dim(a + 1);
        Mat<Rational> br(0, A.dim());
        for (std::size_t i = 0; i < W.layer_basis(0).rows(); ++i)
            for (std::size_t j = 0; j < W.layer_basis(a).rows(); ++j)
                br.append_row(A.bracket(W.layer_basis(0).row(i), W.layer_basis(a).row(j)));
        Mat<Rational> both = br;
        for (std::size_t r = 0; r < W.layer_basis(a + 1).rows(); ++r)
            both.append_row(W.layer_basis(a + 1).row(r));
        const std::size_t rb = rank(br);
        // span equality: brackets stay inside W_{a+1} and reach its dimension
        if (rank(both) != rb || rb != static_cast<std::size_t>(target_dim)) return false;
    }
    return true;
}

/// Given complementary graded subalgebras with L an ideal, W must be a Carnot
/// subgroup; a false return would expose an internal inconsistency.
/// Violated preconditions raise a semantic_error naming the failed one.
inline bool check_normal_complement_is_carnot(const StratifiedAlgebra& A, const Subspace& W,
                                              const Subspace& L) {
    if (!is_graded_subalgebra(A, W)) throw semantic_error("W is not a graded subalgebra");
    if (!is_graded_subalgebra(A, L)) throw semantic_error("L is not a graded subalgebra");
    if (W.dim() + L.dim() != A.dim())
        throw semantic_error("W and L dimensions do not sum to the algebra dimension");
    Mat<Rational> both = W.rref_basis();
    for (int r = 0; r < L.dim(); ++r) both.append_row(L.rref_basis().row(r));
    if (rank(both) != static_cast<std::size_t>(A.dim()))
        throw semantic_error("W and L are not complementary as subspaces");
    if (!is_ideal(A, L)) throw semantic_error("L is not an ideal");
    return check_carnot_subgroup(A, W);
}

} // namespace carnot
