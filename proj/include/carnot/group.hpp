#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <type_traits>
#include <vector>

#include "carnot/algebra.hpp"
#include "carnot/errors.hpp"

namespace carnot {

/// A group element in exponential coordinates of the first kind, ordered by
/// layer. The identity is the zero vector and inversion is coordinate
/// negation. Points do not own their algebra; it must outlive them.
template <class S>
struct PointT {
    const StratifiedAlgebra* alg = nullptr;
    std::vector<S> x;

    PointT() = default;
    PointT(const StratifiedAlgebra& a, std::vector<S> coords) : alg(&a), x(std::move(coords)) {
        if (static_cast<int>(x.size()) != a.dim())
            throw semantic_error("point has " + std::to_string(x.size()) + " coordinates, algebra dimension is " +
                                 std::to_string(a.dim()));
    }
};

using Point = PointT<double>;
using RPoint = PointT<Rational>;

template <class S>
PointT<S> identity(const StratifiedAlgebra& a) {
    return PointT<S>(a, std::vector<S>(a.dim(), S(0)));
}

inline Point identity_d(const StratifiedAlgebra& a) { return identity<double>(a); }

inline Point to_double(const RPoint& p) {
    std::vector<double> v(p.x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = to_double(p.x[i]);
    return Point(*p.alg, std::move(v));
}

namespace detail {
template <class S>
void axpy(std::vector<S>& y, const S& a, const std::vector<S>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}
} // namespace detail

/// Group product: the nilpotent product series in first-kind coordinates,
///   x·y = x + y + ½[x,y] + 1/12([x,[x,y]] + [y,[y,x]]) − 1/24[y,[x,[x,y]]],
/// truncated at the step (all deeper terms vanish for step ≤ 4). Exact when
/// S is Rational.
template <class S>
PointT<S> mul(const PointT<S>& g, const PointT<S>& h) {
    if (g.alg != h.alg) throw semantic_error("mul: points from different algebras");
    const StratifiedAlgebra& A = *g.alg;
    const int s = A.step();
    std::vector<S> z = g.x;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += h.x[i];
    if (s >= 2) {
        const auto xy = A.bracket(g.x, h.x); // [x,y]
        detail::axpy(z, S(1) / S(2), xy);
        if (s >= 3) {
            const auto xxy = A.bracket(g.x, xy); // [x,[x,y]]
            const auto yyx = A.bracket(h.x, A.bracket(h.x, g.x)); // [y,[y,x]]
            detail::axpy(z, S(1) / S(12), xxy);
            detail::axpy(z, S(1) / S(12), yyx);
            if (s >= 4) {
                const auto yxxy = A.bracket(h.x, xxy); // [y,[x,[x,y]]]
                detail::axpy(z, S(-1) / S(24), yxxy);
            }
        }
    }
    return PointT<S>(A, std::move(z));
}

template <class S>
PointT<S> inv(const PointT<S>& g) {
    std::vector<S> z = g.x;
    for (auto& v : z) v = -v;
    return PointT<S>(*g.alg, std::move(z));
}

/// Dilation δ_λ: layer-a coordinates scale by λ^a. A group automorphism.
template <class S>
PointT<S> dilate(const S& lambda, const PointT<S>& g) {
    if (lambda <= S(0)) throw semantic_error("dilate: factor must be positive");
    const StratifiedAlgebra& A = *g.alg;
    std::vector<S> z = g.x;
    S pw = lambda;
    int cur = 0;
    for (int i = 0; i < A.dim(); ++i) {
        while (A.layer_of(i) > cur) {
            pw *= lambda;
            ++cur;
        }
        z[i] *= pw;
    }
    return PointT<S>(A, std::move(z));
}

inline Point dilate(double lambda, const Point& g) { return dilate<double>(lambda, g); }

/// Anisotropic max norm: ‖g‖ = max_a w_a·|g_a|₂^{1/a} with per-layer weights
/// (default 1). Exactly 1-homogeneous under dilations and symmetric under
/// inversion. The induced left-invariant distance is a quasi-metric; the
/// triangle constant is measured empirically per group, not assumed.
struct HomogeneousNorm {
    std::vector<double> layer_weights; // empty = all ones

    double weight(int a) const {
        if (layer_weights.empty()) return 1.0;
        return layer_weights.at(a);
    }

    double operator()(const Point& g) const {
        const StratifiedAlgebra& A = *g.alg;
        double best = 0.0;
        for (int a = 0; a < A.step(); ++a) {
            double s2 = 0.0;
            for (int i = A.layer_offset(a); i < A.layer_offset(a) + A.layer_dim(a); ++i)
                s2 += g.x[i] * g.x[i];
            const double e = std::sqrt(s2);
            const double la = weight(a) * (a == 0 ? e : std::pow(e, 1.0 / (a + 1)));
            best = std::max(best, la);
        }
        return best;
    }
};

inline double hnorm(const Point& g, const HomogeneousNorm& norm = {}) { return norm(g); }

inline double hdist(const Point& g, const Point& h, const HomogeneousNorm& norm = {}) {
    return norm(mul(inv(g), h));
}

/// Coordinate-wise sup distance relative to max(1, |b|_inf). The gauge for
/// asserting that two nearby elements agree to rounding: the homogeneous norm
/// of a difference takes the a-th root of layer-a coordinate gaps, so
/// rounding-level agreement would read as its root under hdist.
inline double coord_distance(const Point& a, const Point& b) {
    double scale = 1.0, worst = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        scale = std::max(scale, std::abs(b.x[i]));
        worst = std::max(worst, std::abs(a.x[i] - b.x[i]));
    }
    return worst / scale;
}

/// Scratch-buffer double arithmetic for inner loops: no per-call allocation.
/// One instance per thread; methods are non-const because they reuse buffers.
class GroupOps {
public:
    explicit GroupOps(const StratifiedAlgebra& A, HomogeneousNorm norm = {})
        : alg_(&A),
          norm_(std::move(norm)),
          b1_(A.dim()),
          b2_(A.dim()),
          b3_(A.dim()),
          nx_(A.dim()),
          d_(A.dim()) {}

    const StratifiedAlgebra& algebra() const { return *alg_; }

    /// z = x·y (z may not alias x or y).
    void mul_into(const double* x, const double* y, double* z) {
        const StratifiedAlgebra& A = *alg_;
        const int n = A.dim();
        const int s = A.step();
        for (int i = 0; i < n; ++i) z[i] = x[i] + y[i];
        if (s < 2) return;
        bracket_into(x, y, b1_.data()); // [x,y]
        for (int i = 0; i < n; ++i) z[i] += 0.5 * b1_[i];
        if (s < 3) return;
        bracket_into(x, b1_.data(), b2_.data()); // [x,[x,y]]
        bracket_into(y, x, b3_.data());          // [y,x]
        for (int i = 0; i < n; ++i) z[i] += b2_[i] / 12.0;
        bracket_into(y, b3_.data(), b1_.data()); // [y,[y,x]]
        for (int i = 0; i < n; ++i) z[i] += b1_[i] / 12.0;
        if (s < 4) return;
        bracket_into(y, b2_.data(), b3_.data()); // [y,[x,[x,y]]]
        for (int i = 0; i < n; ++i) z[i] -= b3_[i] / 24.0;
    }

    /// ‖x⁻¹·y‖ without allocating.
    double dist(const double* x, const double* y) {
        const int n = alg_->dim();
        for (int i = 0; i < n; ++i) nx_[i] = -x[i];
        mul_into(nx_.data(), y, d_.data());
        return norm_of(d_.data());
    }

    double dist(const Point& x, const Point& y) { return dist(x.x.data(), y.x.data()); }

    double norm_of(const double* v) const {
        const StratifiedAlgebra& A = *alg_;
        double best = 0;
        for (int a = 0; a < A.step(); ++a) {
            double s2 = 0;
            for (int i = A.layer_offset(a); i < A.layer_offset(a) + A.layer_dim(a); ++i)
                s2 += v[i] * v[i];
            const double e = std::sqrt(s2);
            best = std::max(best, norm_.weight(a) * (a == 0 ? e : std::pow(e, 1.0 / (a + 1))));
        }
        return best;
    }

private:
    void bracket_into(const double* x, const double* y, double* out) {
        const int n = alg_->dim();
        for (int i = 0; i < n; ++i) out[i] = 0;
        for (const auto& e : alg_->nonzeros()) out[e.k] += e.cd * x[e.i] * y[e.j];
    }

    const StratifiedAlgebra* alg_;
    HomogeneousNorm norm_;
    std::vector<double> b1_, b2_, b3_, nx_, d_;
};

/// Haar-uniform sample of the closed ball {p : hdist(center, p) ≤ r}.
/// Rejection from the per-coordinate bounding box (|u_i| ≤ (r/w_a)^a for i in
/// layer a); Lebesgue measure in first-kind coordinates is the Haar measure,
/// and left translation by the center preserves it. Deterministic given seed.
inline std::vector<Point> sample_ball(const Point& center, double r, int count,
                                      std::uint64_t seed, const HomogeneousNorm& norm = {}) {
    if (r <= 0) throw semantic_error("sample_ball: radius must be positive");
    if (count <= 0) throw semantic_error("sample_ball: count must be positive");
    const StratifiedAlgebra& A = *center.alg;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> bound(A.dim());
    for (int i = 0; i < A.dim(); ++i)
        bound[i] = std::pow(r / norm.weight(A.layer_of(i)), A.layer_of(i) + 1);
    std::vector<Point> out;
    out.reserve(count);
    long long attempts = 0, accepted = 0;
    while (accepted < count) {
        std::vector<double> u(A.dim());
        for (int i = 0; i < A.dim(); ++i) u[i] = bound[i] * uni(rng);
        ++attempts;
        Point cand(A, std::move(u));
        if (norm(cand) <= r) {
            out.push_back(mul(center, cand));
            ++accepted;
        }
        if (attempts >= 1000 && accepted < attempts / 1000)
            throw semantic_error("sample_ball: acceptance rate below 1e-3; degenerate norm weights?");
    }
    return out;
}

} // namespace carnot
