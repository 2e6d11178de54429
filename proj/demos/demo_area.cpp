// Area identity at desk scale: measure the intrinsic graph of the horizontal
// line graph in the first Heisenberg group three independent ways.

#include <cstdio>

#include "carnot/carnot.hpp"

using namespace carnot;

int main() {
    const auto h1 = make_heisenberg(1);
    const Splitting s(h1, Subspace::span_of_basis(h1, {1}), Subspace::span_of_basis(h1, {2, 3}));

    Mat<double> theta(1, 1);
    theta(0, 0) = 0.75; // graph over [0,1] is a one-parameter subgroup of length 1.25
    const auto phi = GraphFunction::intrinsic_linear(
        s, BoxDomain::interval(-2, 2), IntrinsicLinearMap::from_first_layer(s, theta));

    const BoxDomain::Box v{{0.0}, {1.0}};
    AreaConfig cfg;
    cfg.mc_samples = 2000;
    cfg.seed = 7;
    const auto rep = area_check(phi, v, cfg);

    std::vector<Point> curve;
    for (int i = 0; i <= 4000; ++i) curve.push_back(phi.graph_map(s.embed_w({i / 4000.0})));
    const auto len = curve_length(curve);

    std::printf("covering content of Phi(V): %.6f  (err %.2g)\n", rep.lhs, rep.lhs_err);
    std::printf("integral of the Jacobian:  %.6f  (err %.2g)\n", rep.rhs, rep.rhs_err);
    std::printf("curve-length oracle:       %.6f\n", len.value);
    std::printf("exact length:              1.25\n");
    std::printf("relative discrepancy:      %.3g\n", rep.rel_discrepancy);
    return 0;
}
