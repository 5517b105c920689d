// scratch diagnostic: closed-form continuity-defect functional vs the direct
// evaluator plateau, for the exact test seeds.
#include <cstdio>
#include <vector>

#include "nlsdefect/classical_field.hpp"

using namespace nlsdefect;

int main() {
    SeedProfiles seeds;
    seeds.mu0 = AnalyticProfile::bump(0.8, 0.6, 0.9, 0) +
                AnalyticProfile::bump(cplx(0.0, -0.4), -1.1, 0.8, 1);
    auto h = AnalyticProfile::bump(0.3, 1.2, 0.7, 0);
    seeds.mu1 = h + h.reflected();
    const double eta = 1.0;
    auto sp = build_profiles(seeds, ModelParams{0.05, eta});

    // w = beta_-
    auto w = [&](double k) { return sp.beta(HalfLine::minus, k); };

    // functional: C = (2/(2pi)^3) * (-2 i eta) * int conj(w)(k1) k1 V(k1)^2
    //   V(k1) = PV int k w(k) / (k1^2 - k^2) dk
    const double P = 9.0;
    const int M = 4001;
    const double hq = 2.0 * P / (M - 1);
    std::vector<double> node(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) node[static_cast<std::size_t>(i)] = -P + i * hq + 0.5 * hq;
    std::vector<cplx> wv(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) wv[static_cast<std::size_t>(i)] = w(node[static_cast<std::size_t>(i)]);

    cplx acc = 0.0;
    for (int i = 0; i < M; ++i) {
        const double k1 = node[static_cast<std::size_t>(i)];
        const cplx wb = std::conj(wv[static_cast<std::size_t>(i)]);
        if (std::abs(wb) < 1e-17) continue;
        cplx V = 0.0;
        for (int j = 0; j < M; ++j) {
            const double q = node[static_cast<std::size_t>(j)];
            const double den = k1 * k1 - q * q;
            if (std::abs(den) < 1e-12) continue;
            V += hq * q * wv[static_cast<std::size_t>(j)] / den;
        }
        acc += hq * wb * k1 * V * V;
    }
    const cplx functional = 2.0 / std::pow(two_pi, 3) * (-2.0 * iu * eta) * acc;
    std::printf("functional prediction: %+.6e %+.6e i  (|.| = %.6e)\n", functional.real(),
                functional.imag(), std::abs(functional));

    // evaluator plateau: per-pole PV continuity combination at small x, t = 0
    Quadrature quad;
    quad.M = 513;
    const MomentumGrid grid(quad);
    auto n1_pv = [&](HalfLine a, double x) {
        const auto slot = detail::sample_slot(grid, sp, a, 0.0, x, 2);
        const double inv2pi = 1.0 / two_pi;
        cplx v = 0.0;
        for (int i = 1; i + 1 < grid.size(); ++i) {
            const auto is = static_cast<std::size_t>(i);
            if (std::abs(slot.g.g[is]) < 1e-18) continue;
            const cplx cp = inv2pi * cauchy_transform(grid, slot.g, i, +1, 0.0);
            const cplx cm = inv2pi * cauchy_transform(grid, slot.g, i, -1, 0.0);
            const cplx cpv = 0.5 * (cp + cm);
            v += grid.weight(i) * std::conj(slot.g.g[is]) * cpv * cpv;
        }
        return inv2pi * v;
    };
    for (double x : {0.02, 0.005, 0.002}) {
        const cplx c = n1_pv(HalfLine::plus, x) - n1_pv(HalfLine::minus, -x);
        std::printf("evaluator pv combo at x=%.3f: %+.6e %+.6e i  (|.| = %.6e)\n", x, c.real(),
                    c.imag(), std::abs(c));
    }
    return 0;
}
