#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "carnot/graph.hpp"
#include "carnot/group.hpp"
#include "carnot/splitting.hpp"

namespace carnot {

/// Decreasing geometric scale ladder for difference quotients. The default
/// 2^-3..2^-12 stops where double precision starts to dominate second-layer
/// quotients.
struct ScaleLadder {
    std::vector<double> ts;

    static ScaleLadder geometric(double t_first = 1.0 / 8, double t_last = 1.0 / 4096,
                                 double factor = 0.5) {
        if (!(t_first > 0) || !(t_last > 0) || !(t_last <= t_first) || !(factor > 0) ||
            !(factor < 1))
            throw semantic_error("scale ladder parameters must satisfy 0 < t_last <= t_first, 0 < factor < 1");
        ScaleLadder l;
        for (double t = t_first; t >= t_last * (1 - 1e-12); t *= factor) l.ts.push_back(t);
        return l;
    }
};

struct PansuOptions {
    ScaleLadder ladder = ScaleLadder::geometric();
    double tol = 1e-4;           // on the rescaled difference quotient
    int heldout_directions = 4;  // random mixed-layer probes, plus negated basis dirs
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    HomogeneousNorm norm{};
};

/// Outcome of a numerical Pansu differentiation.
///   residual(t, w) = |df[w]⁻¹ · δ_{1/t}(f(a₀)⁻¹·f(a₀·δ_t w))| / |w|
/// The convergence flag requires the per-scale sup residual to decrease
/// monotonically (10% slack), the finest increments to be Cauchy, the final
/// residual to clear tol, and the assembled map to respect brackets.
struct DifferentiabilityReport {
    Point base_point;
    std::optional<HomogeneousHom> differential;
    std::vector<double> scales;
    std::vector<std::string> direction_labels;
    std::vector<std::vector<double>> residuals; // [direction][scale]
    std::vector<double> sup_residual_per_scale;
    double final_residual = std::numeric_limits<double>::quiet_NaN();
    double bracket_defect = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> projection_identity_residual;
    bool converged = false;
    std::string failure_reason;
};

namespace detail {

inline bool monotone_with_slack(const std::vector<double>& r, double slack = 0.10,
                                double floor = 1e-12) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (r[i + 1] > (1.0 + slack) * r[i] + floor) return false;
    return true;
}

} // namespace detail

/// Numerical Pansu differential of f : W -> G at a₀. First-layer directions
/// determine the candidate (W is bracket-generated by its first layer); the
/// candidate is then cross-validated on negated and random held-out
/// directions at every scale.
inline DifferentiabilityReport pansu_diff(const Subspace& W,
                                          const std::function<Point(const Point&)>& f,
                                          const Point& a0, const PansuOptions& opt = {}) {
    const StratifiedAlgebra& A = W.algebra();
    DifferentiabilityReport rep;
    rep.base_point = a0;
    rep.scales = opt.ladder.ts;
    const int m1 = W.layer_dim(0);
    if (m1 == 0) throw semantic_error("pansu_diff: W has an empty first layer");

    // direction set: first-layer basis, then negated basis, then random probes
    std::vector<Point> dirs;
    for (int j = 0; j < m1; ++j) {
        std::vector<double> c(W.dim(), 0.0);
        c[j] = 1.0;
        dirs.emplace_back(A, W.vector_from_coords(c));
        rep.direction_labels.push_back("e" + std::to_string(j + 1));
    }
    for (int j = 0; j < m1; ++j) {
        std::vector<double> c(W.dim(), 0.0);
        c[j] = -1.0;
        dirs.emplace_back(A, W.vector_from_coords(c));
        rep.direction_labels.push_back("-e" + std::to_string(j + 1));
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int h = 0; h < opt.heldout_directions; ++h) {
        std::vector<double> c(W.dim());
        for (auto& v : c) v = uni(rng);
        Point p(A, W.vector_from_coords(c));
        const double n = opt.norm(p);
        if (n > 1e-9) p = dilate(1.0 / n, p);
        dirs.push_back(p);
        rep.direction_labels.push_back("probe" + std::to_string(h + 1));
    }

    // rescaled increments D_t(w) for every direction and scale
    const Point fa0 = f(a0);
    const Point fa0_inv = inv(fa0);
    std::vector<std::vector<Point>> incr(dirs.size());
    for (std::size_t d = 0; d < dirs.size(); ++d)
        for (double t : opt.ladder.ts)
            incr[d].push_back(dilate(1.0 / t, mul(fa0_inv, f(mul(a0, dilate(t, dirs[d]))))));

    // candidate homomorphism from the finest first-layer increments. A
    // homogeneous homomorphism is layer-preserving, so only the first-layer
    // part of the increment enters the candidate; any mass the increments
    // keep in deeper layers (a diverging vertical component, say) is left to
    // the residuals, which then flag non-differentiability.
    Mat<double> first_cols(A.dim(), m1);
    for (int j = 0; j < m1; ++j)
        for (int i = 0; i < A.dim(); ++i)
            first_cols(i, j) = (A.layer_of(i) == 0) ? incr[j].back().x[i] : 0.0;
    HomogeneousHom H = HomogeneousHom::from_first_layer(W, first_cols);
    rep.differential = H;
    rep.bracket_defect = H.bracket_defect();

    // residual curves
    rep.residuals.assign(dirs.size(), std::vector<double>(opt.ladder.ts.size(), 0.0));
    rep.sup_residual_per_scale.assign(opt.ladder.ts.size(), 0.0);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Point img = H.apply(dirs[d]);
        const double dn = std::max(opt.norm(dirs[d]), 1e-300);
        for (std::size_t si = 0; si < opt.ladder.ts.size(); ++si) {
            const double r = opt.norm(mul(inv(img), incr[d][si])) / dn;
            rep.residuals[d][si] = r;
            rep.sup_residual_per_scale[si] = std::max(rep.sup_residual_per_scale[si], r);
        }
    }
    rep.final_residual = rep.sup_residual_per_scale.back();

    // Cauchy check on the three finest basis increments
    bool cauchy_ok = true;
    for (int j = 0; j < m1 && cauchy_ok; ++j) {
        const auto& seq = incr[j];
        const std::size_t n = seq.size();
        for (std::size_t si = (n >= 4 ? n - 4 : 0); si + 1 < n; ++si)
            if (opt.norm(mul(inv(seq[si]), seq[si + 1])) > opt.tol) {
                cauchy_ok = false;
                break;
            }
    }

    // Exactly differentiable maps sit at the rounding floor of the rescaled
    // quotient (~sqrt(eps)/t), where noise grows as t shrinks; a curve that
    // never leaves the tolerance band counts as converged even if it is not
    // monotone at that floor.
    double max_residual = 0;
    for (double r : rep.sup_residual_per_scale) max_residual = std::max(max_residual, r);
    const bool monotone =
        detail::monotone_with_slack(rep.sup_residual_per_scale) || max_residual <= opt.tol;
    const bool final_ok = rep.final_residual <= opt.tol;
    const bool bracket_ok = rep.bracket_defect <= opt.tol;
    rep.converged = cauchy_ok && monotone && final_ok && bracket_ok;
    if (!rep.converged) {
        if (!bracket_ok)
            rep.failure_reason = "assembled map does not respect brackets";
        else if (!cauchy_ok)
            rep.failure_reason = "difference quotients are not Cauchy along the ladder";
        else if (!monotone)
            rep.failure_reason = "residuals do not decrease along the ladder";
        else
            rep.failure_reason = "final residual above tolerance";
    }
    return rep;
}

struct IntrinsicDiffResult {
    DifferentiabilityReport report;
    std::optional<IntrinsicLinearMap> differential; // d^φφ_{a₀}
};

struct IntrinsicDiffOptions {
    PansuOptions pansu{};
    double projection_tol = 1e-6;
    double interior_margin = 0.0;
};

/// Intrinsic differential through the graph map: run pansu_diff on Φ, check
/// that the differential projects back to the identity on W, and return
/// d^φφ_{a₀}[w] = w⁻¹·dΦ[w] as an intrinsically linear map.
inline IntrinsicDiffResult intrinsic_diff(const GraphFunction& phi, const Point& a0,
                                          const IntrinsicDiffOptions& opt = {}) {
    const Splitting& s = phi.splitting();
    if (!phi.interior_point(a0, opt.interior_margin))
        throw semantic_error("intrinsic_diff: base point is not an interior domain point");
    IntrinsicDiffResult out;
    out.report = pansu_diff(
        s.w_space(), [&phi](const Point& w) { return phi.graph_map(w); }, a0, opt.pansu);
    if (!out.report.differential) return out;

    const double proj_res =
        IntrinsicLinearMap::projection_identity_defect(s, *out.report.differential);
    out.report.projection_identity_residual = proj_res;
    if (proj_res > opt.projection_tol) {
        out.report.converged = false;
        out.report.failure_reason = "graph differential does not project to the identity on W";
        return out;
    }
    if (out.report.converged)
        out.differential =
            IntrinsicLinearMap(s, *out.report.differential, std::max(opt.projection_tol, 1e-9),
                               std::max(opt.pansu.tol, 1e-9));
    return out;
}

/// Quotient of the shifted-function characterization of the intrinsic
/// differential along b = δ_t·u:  |ℓ(b)⁻¹·φ_{p₀}(b)| / |b| with
/// p₀ = φ(a₀)⁻¹·a₀⁻¹. Converges to zero exactly when ℓ is the differential.
inline std::vector<double> intrinsic_quotient_trace(const GraphFunction& phi, const Point& a0,
                                                    const IntrinsicLinearMap& ell, const Point& u,
                                                    const ScaleLadder& ladder = ScaleLadder::geometric(),
                                                    const HomogeneousNorm& norm = {}) {
    const Point p0 = mul(inv(phi.eval(a0)), inv(a0));
    const GraphFunction shifted = translate(phi, p0);
    std::vector<double> vals;
    vals.reserve(ladder.ts.size());
    for (double t : ladder.ts) {
        const Point b = dilate(t, u);
        if (!shifted.in_domain(b))
            throw semantic_error("quotient trace: rescaled direction leaves the shifted domain");
        const Point v = shifted.eval(b);
        vals.push_back(norm(mul(inv(ell.value(b)), v)) / std::max(norm(b), 1e-300));
    }
    return vals;
}

// ---------------------------------------------------------------------------
// Blow-up diagnostics
// ---------------------------------------------------------------------------

struct BlowupOptions {
    int graph_samples = 20000;
    int tangent_samples = 4000;
    int min_ball_points = 10;
    std::uint64_t seed = 0xb10c0ffeeull;
    HomogeneousNorm norm{};
};

struct BlowupTrace {
    std::vector<double> lambdas;
    std::vector<double> distances;     // one-sided: blown-up graph -> candidate
    std::vector<int> points_in_ball;
};

/// For each λ, map graph samples through p ↦ δ_λ(Φ(a₀)⁻¹·p), keep those in
/// B(e,R), and measure the one-sided sampled Hausdorff distance to the
/// candidate subgroup T∩B(e,R). Decreasing traces indicate T is tangent.
inline BlowupTrace blowup_tangent_check(const GraphFunction& phi, const Point& a0,
                                        const Subspace& T, const std::vector<double>& lambdas,
                                        double R, const BlowupOptions& opt = {}) {
    if (!T.homogeneous()) throw semantic_error("blow-up candidate must be homogeneous");
    const StratifiedAlgebra& A = phi.splitting().algebra();
    const Point base_inv = inv(phi.graph_map(a0));
    std::mt19937_64 rng(opt.seed);

    // net on T ∩ B(e,R): coordinates of a layer-a row are bounded by R^a
    std::vector<Point> net;
    {
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        int guard = 0;
        while (static_cast<int>(net.size()) < opt.tangent_samples && guard < 200 * opt.tangent_samples) {
            ++guard;
            std::vector<double> c(T.dim());
            for (int r = 0; r < T.dim(); ++r)
                c[r] = uni(rng) * std::pow(R, T.graded_layers()[r] + 1);
            Point p(A, T.vector_from_coords(c));
            if (opt.norm(p) <= R) net.push_back(std::move(p));
        }
        if (net.empty()) throw semantic_error("blow-up: no tangent-candidate samples in the ball");
    }

    // graph samples, reused for every lambda
    std::vector<Point> graph_pts;
    graph_pts.reserve(opt.graph_samples);
    for (int i = 0; i < opt.graph_samples; ++i)
        graph_pts.push_back(phi.graph_map(phi.sample_domain(rng)));

    BlowupTrace trace;
    for (double lam : lambdas) {
        double worst = 0;
        int kept = 0;
        for (const auto& p : graph_pts) {
            const Point e = dilate(lam, mul(base_inv, p));
            if (opt.norm(e) > R) continue;
            ++kept;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& t : net) best = std::min(best, hdist(e, t, opt.norm));
            worst = std::max(worst, best);
        }
        if (kept < opt.min_ball_points)
            throw semantic_error("blow-up: too few graph samples land in the ball at lambda " +
                                 std::to_string(lam));
        trace.lambdas.push_back(lam);
        trace.distances.push_back(worst);
        trace.points_in_ball.push_back(kept);
    }
    return trace;
}

} // namespace carnot
