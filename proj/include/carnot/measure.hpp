#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "carnot/calculus.hpp"
#include "carnot/graph.hpp"
#include "carnot/group.hpp"

namespace carnot {

struct MeasureEstimate {
    double value = 0;
    double error = 0;
    enum class Method { covering, curve_length, classical_oracle } method = Method::covering;
    double delta = 0;            // finest covering scale, when applicable
    std::size_t sample_count = 0;
    std::string note;            // heuristic warnings
};

// ---------------------------------------------------------------------------
// Covering content
// ---------------------------------------------------------------------------

namespace detail {

inline void sort_lexicographic(std::vector<Point>& pts) {
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x < b.x; });
}

/// Greedy net covering: scan points in order; every point not yet covered
/// becomes a ball center and covers everything within delta. Centers end up
/// pairwise more than delta apart, so N(delta)·delta^k tracks the content
/// with constant ≈ 1 on curves (net spacing equals the radius).
inline std::size_t greedy_covering_count(GroupOps& ops, const std::vector<Point>& sorted_pts,
                                         double delta) {
    std::vector<std::uint32_t> alive(sorted_pts.size());
    std::iota(alive.begin(), alive.end(), 0u);
    std::size_t balls = 0;
    std::vector<std::uint32_t> next;
    next.reserve(alive.size());
    while (!alive.empty()) {
        const Point& c = sorted_pts[alive.front()];
        ++balls;
        next.clear();
        for (std::size_t t = 1; t < alive.size(); ++t) {
            const Point& p = sorted_pts[alive[t]];
            if (ops.dist(c.x.data(), p.x.data()) > delta) next.push_back(alive[t]);
        }
        alive.swap(next);
    }
    return balls;
}

} // namespace detail

/// Per-delta covering contents N(delta)·delta^k over a descending delta
/// ladder. The headline value is the finest-scale content: the covering error
/// is +O(delta) from boundary overcount but -O(gap/delta) from the discrete
/// sample, so extrapolating in delta alone amplifies the sampling bias. The
/// linear extrapolation from the two finest scales is kept as a separately
/// reported diagnostic, and the spread enters the error bar.
struct ContentLadder {
    std::vector<double> deltas;
    std::vector<double> values;
    std::vector<std::size_t> ball_counts;
    double extrapolated = 0;

    MeasureEstimate estimate(std::size_t samples) const {
        MeasureEstimate e;
        e.method = MeasureEstimate::Method::covering;
        e.sample_count = samples;
        e.delta = deltas.empty() ? 0 : deltas.back();
        if (!values.empty()) {
            e.value = values.back();
            const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
            e.error = std::max(std::abs(extrapolated - values.back()), (*mx - *mn) / 2);
        }
        return e;
    }
};

/// Covering content of a sampled set at one scale: greedy net covering by
/// homogeneous balls of radius delta, lexicographic candidate order, returns
/// N(delta)·delta^k. The sample must be dense at scale delta; a coarse sample
/// (fewer than two points per ball on average) is rejected.
inline MeasureEstimate hausdorff_content(std::vector<Point> pts, double k, double delta,
                                         const HomogeneousNorm& norm = {}) {
    MeasureEstimate est;
    est.method = MeasureEstimate::Method::covering;
    est.delta = delta;
    est.sample_count = pts.size();
    if (pts.empty()) return est;
    if (delta <= 0) throw semantic_error("hausdorff_content: delta must be positive");
    detail::sort_lexicographic(pts);
    GroupOps ops(*pts.front().alg, norm);
    const std::size_t balls = detail::greedy_covering_count(ops, pts, delta);
    if (balls >= 4 && pts.size() < 2 * balls)
        throw semantic_error("hausdorff_content: sampling density too coarse for delta");
    est.value = static_cast<double>(balls) * std::pow(delta, k);
    return est;
}

inline ContentLadder hausdorff_content_ladder(std::vector<Point> pts, double k,
                                              std::vector<double> deltas,
                                              const HomogeneousNorm& norm = {}) {
    if (deltas.empty()) throw semantic_error("content ladder needs at least one delta");
    std::sort(deltas.rbegin(), deltas.rend());
    ContentLadder lad;
    lad.deltas = deltas;
    if (pts.empty()) {
        lad.values.assign(deltas.size(), 0.0);
        lad.ball_counts.assign(deltas.size(), 0);
        return lad;
    }
    detail::sort_lexicographic(pts);
    GroupOps ops(*pts.front().alg, norm);
    for (double d : deltas) {
        const std::size_t balls = detail::greedy_covering_count(ops, pts, d);
        if (balls >= 4 && pts.size() < 2 * balls)
            throw semantic_error("hausdorff_content: sampling density too coarse for delta");
        lad.ball_counts.push_back(balls);
        lad.values.push_back(static_cast<double>(balls) * std::pow(d, k));
    }
    if (lad.values.size() == 1) {
        lad.extrapolated = lad.values[0];
    } else {
        // model c(delta) = c0 + a·delta through the two finest scales
        const double df = deltas[deltas.size() - 1], dp = deltas[deltas.size() - 2];
        const double cf = lad.values[deltas.size() - 1], cp = lad.values[deltas.size() - 2];
        lad.extrapolated = (cf * dp - cp * df) / (dp - df);
    }
    return lad;
}

// ---------------------------------------------------------------------------
// Curve length
// ---------------------------------------------------------------------------

/// Sum of consecutive homogeneous distances along an ordered curve sample;
/// the measure of horizontal curves and the oracle for one-dimensional
/// graphs. A back-tracking heuristic flags inputs that look unordered.
inline MeasureEstimate curve_length(const std::vector<Point>& ordered,
                                    const HomogeneousNorm& norm = {}) {
    MeasureEstimate est;
    est.method = MeasureEstimate::Method::curve_length;
    est.sample_count = ordered.size();
    if (ordered.size() < 2) return est;
    GroupOps ops(*ordered.front().alg, norm);
    double len = 0;
    std::size_t backtracks = 0;
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        const double leg = ops.dist(ordered[i].x.data(), ordered[i + 1].x.data());
        len += leg;
        if (i > 0) {
            const double skip = ops.dist(ordered[i - 1].x.data(), ordered[i + 1].x.data());
            const double prev = ops.dist(ordered[i - 1].x.data(), ordered[i].x.data());
            if (skip < 0.3 * (prev + leg) && prev + leg > 0) ++backtracks;
        }
    }
    est.value = len;
    if (ordered.size() > 4 && backtracks * 10 > ordered.size())
        est.note = "large back-tracking ratio: input may be unordered";
    return est;
}

// ---------------------------------------------------------------------------
// Subgroup ball sampling and the Jacobian
// ---------------------------------------------------------------------------

/// Haar-uniform sample of {w in W : ‖w‖ ≤ r}: rejection from the graded
/// coordinate box |c_a| ≤ (r/w_a)^a, which contains the ball because graded
/// coordinates are read off single layer components.
inline std::vector<Point> sample_subgroup_ball(const Subspace& W, double r, int count,
                                               std::uint64_t seed,
                                               const HomogeneousNorm& norm = {}) {
    if (r <= 0 || count <= 0) throw semantic_error("sample_subgroup_ball: bad radius or count");
    const StratifiedAlgebra& A = W.algebra();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> bound(W.dim());
    for (int rr = 0; rr < W.dim(); ++rr) {
        const int a = W.graded_layers()[rr];
        bound[rr] = std::pow(r / norm.weight(a), a + 1);
    }
    std::vector<Point> out;
    out.reserve(count);
    long long attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        std::vector<double> c(W.dim());
        for (int rr = 0; rr < W.dim(); ++rr) c[rr] = bound[rr] * uni(rng);
        ++attempts;
        Point p(A, W.vector_from_coords(c));
        if (hnorm(p, norm) <= r) out.push_back(std::move(p));
        if (attempts >= 1000 && static_cast<long long>(out.size()) < attempts / 1000)
            throw semantic_error("sample_subgroup_ball: acceptance rate below 1e-3");
    }
    return out;
}

/// Covering scales and sample counts default by the homogeneous dimension of
/// the source: a k-dimensional covering needs the typical sample gap
/// (content/M)^{1/k} well below the finest delta, so higher k takes coarser
/// scales and more samples.
struct JacobianOptions {
    std::vector<double> deltas{};  // empty: chosen from k
    int ball_samples = 0;          // 0: chosen from k
    std::uint64_t seed = 0x5eedba11ull;
    HomogeneousNorm norm{};

    std::vector<double> resolved_deltas(int k) const {
        if (!deltas.empty()) return deltas;
        if (k <= 1) return {0.2, 0.1, 0.05};
        if (k == 2) return {0.3, 0.2};
        return {0.45, 0.3};
    }
    int resolved_ball_samples(int k) const {
        if (ball_samples > 0) return ball_samples;
        if (k <= 1) return 4000;
        if (k == 2) return 80000;
        return 150000;
    }
};

struct JacobianEstimate {
    double value = 0;
    double error = 0;
    double ratio_extrapolated = 0;
    int k = 0;
    std::vector<double> deltas;
    std::vector<double> numerator;
    std::vector<double> denominator;
    std::vector<double> ratio;
    std::size_t ball_samples = 0;
};

/// Jacobian of a homogeneous map from W: the ratio of the image content of
/// the unit ball of W to the ball's own content, both measured with matched
/// covering protocols so the covering bias largely cancels. The sample count
/// grows with the image radius, keeping the image as densely sampled as the
/// ball itself (an expanding map would otherwise be under-resolved and its
/// content biased low).
inline JacobianEstimate jacobian(const HomogeneousHom& F, const JacobianOptions& opt = {}) {
    const int k = F.source().homogeneous_dimension();
    const auto deltas = opt.resolved_deltas(k);
    const auto probe = sample_subgroup_ball(F.source(), 1.0, 64, opt.seed ^ 0xabcdefull, opt.norm);
    double image_radius = 0;
    for (const auto& w : probe) image_radius = std::max(image_radius, hnorm(F.apply(w), opt.norm));
    const double factor =
        std::clamp(std::pow(std::max(1.0, image_radius), static_cast<double>(k)), 1.0, 64.0);
    const int count = static_cast<int>(std::ceil(opt.resolved_ball_samples(k) * factor));

    const auto ball = sample_subgroup_ball(F.source(), 1.0, count, opt.seed, opt.norm);
    std::vector<Point> image;
    image.reserve(ball.size());
    for (const auto& w : ball) image.push_back(F.apply(w));
    const ContentLadder den = hausdorff_content_ladder(ball, k, deltas, opt.norm);
    const ContentLadder num = hausdorff_content_ladder(std::move(image), k, deltas, opt.norm);

    JacobianEstimate est;
    est.k = k;
    est.deltas = num.deltas;
    est.numerator = num.values;
    est.denominator = den.values;
    est.ball_samples = ball.size();
    const auto den_est = den.estimate(ball.size());
    if (den_est.value <= den_est.error || den_est.value <= 0)
        throw semantic_error("jacobian: denominator content is consistent with zero");
    for (std::size_t i = 0; i < num.values.size(); ++i)
        est.ratio.push_back(num.values[i] / den.values[i]);
    est.value = est.ratio.back();
    if (est.ratio.size() == 1) {
        est.ratio_extrapolated = est.value;
        est.error = 0;
    } else {
        const std::size_t n = est.ratio.size();
        const double df = est.deltas[n - 1], dp = est.deltas[n - 2];
        est.ratio_extrapolated = (est.ratio[n - 1] * dp - est.ratio[n - 2] * df) / (dp - df);
        const auto [mn, mx] = std::minmax_element(est.ratio.begin(), est.ratio.end());
        est.error = std::max(std::abs(est.ratio_extrapolated - est.value), (*mx - *mn) / 2);
    }
    return est;
}

// ---------------------------------------------------------------------------
// Area formula check
// ---------------------------------------------------------------------------

struct AreaConfig {
    std::vector<double> deltas{0.2, 0.1, 0.05};
    int mc_samples = 10000;
    int ball_samples = 1500;
    int density_per_ball = 40;       // grid points per covering ball on Phi(V)
    std::size_t max_grid_points = 2000000;
    std::uint64_t seed = 1;
    IntrinsicDiffOptions diff{};
    double diff_failure_limit = 0.01;
    // Differentials whose matrices agree to this relative quantum share one
    // Jacobian evaluation; the Jacobian is Lipschitz in the matrix, so the
    // shortcut costs far less accuracy than the covering noise. Zero disables.
    double jacobian_cache_quantum = 1e-3;
    HomogeneousNorm norm{};

    AreaConfig() {
        // The Jacobian integrand tolerates percent-level differentials; the
        // difference quotient of a smooth nonlinear graph sits near 1e-4·|x|
        // at the finest default scale, so the strict quotient tolerance would
        // misread smooth points as failures.
        diff.pansu.tol = 1e-3;
    }
};

struct AreaReport {
    double lhs = 0, rhs = 0;
    double lhs_err = 0, rhs_err = 0;
    double rel_discrepancy = 0;
    double v_content = 0, v_content_err = 0;
    double mean_jacobian = 0, mean_jacobian_err = 0, jacobian_stderr = 0;
    ContentLadder lhs_ladder, v_ladder;
    int mc_samples = 0;
    int diff_failures = 0;
    double diff_failure_rate = 0;
    std::uint64_t seed = 0;
    std::size_t lhs_samples = 0;
};

/// Verify the graph area identity on a box V ⊆ U: the covering content of
/// Φ(V) against the Monte-Carlo integral of the Jacobian of the intrinsic
/// differential over V. Both sides use the same covering convention, so the
/// normalization constant of the content cancels in the comparison.
inline AreaReport area_check(const GraphFunction& phi, const BoxDomain::Box& V,
                             const AreaConfig& cfg = {}) {
    const Splitting& s = phi.splitting();
    const int k = s.homogeneous_dim_w();
    const int dw = s.topological_dim_w();
    if (static_cast<int>(V.lo.size()) != dw) throw semantic_error("area_check: V has wrong dimension");
    AreaReport rep;
    rep.seed = cfg.seed;
    rep.mc_samples = cfg.mc_samples;

    // deterministic dense grid on V. The graph map can stretch coordinate
    // gaps, so a coarse probe estimates the worst image gap per unit of
    // coordinate spacing and the grid is refined accordingly, keeping the
    // image sample dense at the finest covering scale.
    const double dmin = *std::min_element(cfg.deltas.begin(), cfg.deltas.end());
    BoxDomain vdom({V});
    double stretch = 1.0;
    {
        const auto probe = vdom.grid(std::max(dmin / 4, 1e-6));
        GroupOps ops(s.algebra(), cfg.norm);
        Point prev = s.embed_w(probe.front());
        if (!phi.in_domain(prev)) throw semantic_error("area_check: V is not contained in the domain");
        Point prev_img = phi.graph_map(prev);
        for (std::size_t i = 1; i < probe.size(); ++i) {
            const Point w = s.embed_w(probe[i]);
            if (!phi.in_domain(w))
                throw semantic_error("area_check: V is not contained in the domain");
            const Point img = phi.graph_map(w);
            double gap = 0;
            for (std::size_t j = 0; j < probe[i].size(); ++j)
                gap = std::max(gap, std::abs(probe[i][j] - probe[i - 1][j]));
            if (gap > 0)
                stretch = std::max(stretch, ops.dist(prev_img.x.data(), img.x.data()) / gap);
            prev_img = img;
        }
    }
    double spacing = dmin / (cfg.density_per_ball * stretch);
    std::vector<std::vector<double>> grid = vdom.grid(spacing);
    while (grid.size() > cfg.max_grid_points) {
        spacing *= 1.5;
        grid = vdom.grid(spacing);
    }
    std::vector<Point> v_pts, phi_pts;
    v_pts.reserve(grid.size());
    phi_pts.reserve(grid.size());
    for (const auto& c : grid) {
        const Point w = s.embed_w(c);
        if (!phi.in_domain(w)) throw semantic_error("area_check: V is not contained in the domain");
        v_pts.push_back(w);
        phi_pts.push_back(phi.graph_map(w));
    }
    rep.lhs_samples = phi_pts.size();

    rep.lhs_ladder = hausdorff_content_ladder(std::move(phi_pts), k, cfg.deltas, cfg.norm);
    const auto lhs_est = rep.lhs_ladder.estimate(rep.lhs_samples);
    rep.lhs = lhs_est.value;
    rep.lhs_err = lhs_est.error;

    rep.v_ladder = hausdorff_content_ladder(std::move(v_pts), k, cfg.deltas, cfg.norm);
    const auto v_est = rep.v_ladder.estimate(rep.lhs_samples);
    rep.v_content = v_est.value;
    rep.v_content_err = v_est.error;

    // Monte-Carlo mean of J(dΦ_x) over V; every point runs the same matched
    // numerator/denominator covering protocol with a per-point seed
    JacobianOptions jopt;
    jopt.deltas = cfg.deltas;
    jopt.ball_samples = cfg.ball_samples;
    jopt.norm = cfg.norm;

    std::mt19937_64 rng(cfg.seed);
    std::vector<double> jvals;
    double jerr_sum = 0;
    jvals.reserve(cfg.mc_samples);
    std::map<std::vector<long long>, std::pair<double, double>> jcache;
    for (int i = 0; i < cfg.mc_samples; ++i) {
        const Point x(s.algebra(), s.w_space().vector_from_coords(vdom.sample(rng)));
        IntrinsicDiffResult d;
        try {
            d = intrinsic_diff(phi, x, cfg.diff);
        } catch (const semantic_error&) {
            ++rep.diff_failures;
            continue;
        }
        if (!d.report.converged || !d.report.differential) {
            ++rep.diff_failures;
            continue;
        }
        const auto& m = d.report.differential->matrix();
        std::pair<double, double> j;
        bool cached = false;
        std::vector<long long> key;
        if (cfg.jacobian_cache_quantum > 0) {
            double scale = 1;
            for (std::size_t r = 0; r < m.rows(); ++r)
                for (std::size_t c = 0; c < m.cols(); ++c) scale = std::max(scale, std::abs(m(r, c)));
            key.reserve(m.rows() * m.cols());
            for (std::size_t r = 0; r < m.rows(); ++r)
                for (std::size_t c = 0; c < m.cols(); ++c)
                    key.push_back(std::llround(m(r, c) / (cfg.jacobian_cache_quantum * scale)));
            const auto it = jcache.find(key);
            if (it != jcache.end()) {
                j = it->second;
                cached = true;
            }
        }
        if (!cached) {
            jopt.seed = cfg.seed + 0x9e37u + static_cast<std::uint64_t>(i) * 7919u;
            const auto jest = jacobian(*d.report.differential, jopt);
            j = {jest.value, jest.error};
            if (cfg.jacobian_cache_quantum > 0) jcache.emplace(std::move(key), j);
        }
        jvals.push_back(j.first);
        jerr_sum += j.second;
    }
    rep.diff_failure_rate = static_cast<double>(rep.diff_failures) / cfg.mc_samples;
    if (rep.diff_failure_rate > cfg.diff_failure_limit)
        throw verification_error("area_check: differentiation failed at " +
                                 std::to_string(100 * rep.diff_failure_rate) +
                                 "% of sampled points");

    const double n = static_cast<double>(jvals.size());
    double mean = 0;
    for (double j : jvals) mean += j;
    mean /= n;
    double var = 0;
    for (double j : jvals) var += (j - mean) * (j - mean);
    var = (n > 1) ? var / (n - 1) : 0.0;
    rep.mean_jacobian = mean;
    rep.jacobian_stderr = std::sqrt(var / n);
    rep.mean_jacobian_err = jerr_sum / n;

    rep.rhs = mean * rep.v_content;
    rep.rhs_err = rep.v_content * (rep.jacobian_stderr + rep.mean_jacobian_err) +
                  mean * rep.v_content_err;
    rep.rel_discrepancy =
        std::abs(rep.lhs - rep.rhs) / std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
    return rep;
}

// ---------------------------------------------------------------------------
// Classical oracle (abelian groups only)
// ---------------------------------------------------------------------------

namespace detail {

inline double det_small(Mat<double> m) {
    const std::size_t n = m.rows();
    double det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
        if (m(p, c) == 0.0) return 0.0;
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

} // namespace detail

/// Euclidean area-formula oracle for abelian groups: midpoint quadrature of
/// sqrt(det(I + ∇φᵀ∇φ)) over the box V, with central finite differences for
/// ∇φ. Independent of the covering estimator.
inline double classical_area_oracle(const GraphFunction& phi, const BoxDomain::Box& V,
                                    int grid_per_axis = 600) {
    const Splitting& s = phi.splitting();
    if (s.algebra().step() != 1)
        throw semantic_error("classical_area_oracle: the group must be abelian");
    const int dw = s.topological_dim_w();
    const int dl = s.l_space().dim();
    if (static_cast<int>(V.lo.size()) != dw) throw semantic_error("oracle: V has wrong dimension");

    auto lvalue = [&](const std::vector<double>& c) {
        return s.l_coords(phi.eval(s.embed_w(c)));
    };
    auto integrand = [&](const std::vector<double>& c) {
        Mat<double> jac(dl, dw);
        for (int j = 0; j < dw; ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(c[j]));
            auto cp = c, cm = c;
            cp[j] += h;
            cm[j] -= h;
            const auto fp = lvalue(cp), fm = lvalue(cm);
            for (int i = 0; i < dl; ++i) jac(i, j) = (fp[i] - fm[i]) / (2 * h);
        }
        Mat<double> g(dw, dw);
        for (int a = 0; a < dw; ++a)
            for (int b = 0; b < dw; ++b) {
                double sum = (a == b) ? 1.0 : 0.0;
                for (int i = 0; i < dl; ++i) sum += jac(i, a) * jac(i, b);
                g(a, b) = sum;
            }
        return std::sqrt(detail::det_small(g));
    };

    std::vector<int> steps(dw, grid_per_axis);
    double cell = 1.0;
    for (int j = 0; j < dw; ++j) cell *= (V.hi[j] - V.lo[j]) / steps[j];
    std::vector<int> idx(dw, 0);
    double total = 0;
    for (;;) {
        std::vector<double> c(dw);
        for (int j = 0; j < dw; ++j)
            c[j] = V.lo[j] + (V.hi[j] - V.lo[j]) * (idx[j] + 0.5) / steps[j];
        total += integrand(c);
        int j = 0;
        while (j < dw && ++idx[j] == steps[j]) idx[j++] = 0;
        if (j == dw) break;
    }
    return total * cell;
}

} // namespace carnot
