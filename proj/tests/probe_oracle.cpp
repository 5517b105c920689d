// scratch diagnostic: whole-line (eta = 0) Rosales order-1 validation against
// the CN oracle, for a generic lambda profile and both series signs.
#include <cstdio>

#include "nlsdefect/pde_oracle.hpp"

using namespace nlsdefect;

namespace {
// evaluate the order-n Rosales term for an explicit lambda profile
cplx rosales_direct(const AnalyticProfile& lam, int n, int alpha, double t, double x,
                    const MomentumGrid& grid) {
    auto lam1 = lam.derivative();
    auto lam2 = lam1.derivative();
    SampledFunction s = SampledFunction::from(grid, [&](double q, int o) -> cplx {
        const cplx l = o == 0 ? lam(q) : (o == 1 ? lam1(q) : lam2(q));
        const cplx l0 = lam(q), l1 = lam1(q), l2 = lam2(q);
        const cplx ph = std::exp(iu * (q * x - q * q * t));
        const cplx ip1 = iu * (x - 2.0 * q * t);
        if (o == 0) return l0 * ph;
        if (o == 1) return (l1 + l0 * ip1) * ph;
        return (l2 + 2.0 * l1 * ip1 + l0 * (ip1 * ip1 - 2.0 * iu * t)) * ph;
        (void)l;
    });
    const double inv2pi = 1.0 / two_pi;
    if (n == 0) {
        cplx v = 0.0;
        for (int j = 0; j < grid.size(); ++j) v += grid.weight(j) * s.g[static_cast<std::size_t>(j)];
        return inv2pi * v;
    }
    // n = 1
    std::vector<cplx> C(static_cast<std::size_t>(grid.size()), cplx(0.0));
    double gmax = 0.0;
    for (auto& gv : s.g) gmax = std::max(gmax, std::abs(gv));
    cplx v = 0.0;
    for (int i = 1; i + 1 < grid.size(); ++i) {
        const auto is = static_cast<std::size_t>(i);
        if (std::abs(s.g[is]) < 1e-17 * gmax) continue;
        C[is] = inv2pi * cauchy_transform(grid, s, i, alpha, 0.0);
        v += grid.weight(i) * std::conj(s.g[is]) * C[is] * C[is];
    }
    return inv2pi * v;
}
}  // namespace

int main() {
    // generic whole-line lambda (no defect structure)
    auto lam = AnalyticProfile::bump(0.9, 0.7, 0.8, 0) +
               AnalyticProfile::bump(cplx(0.2, -0.5), -0.9, 0.7, 1);

    MomentumGrid grid(8.0, 321);
    OracleGrid geom;
    geom.X = 24.0;
    geom.dx = 0.01;
    geom.dt = 2e-4;

    const double g = 0.1;
    ModelParams mp{g, 0.0};  // eta = 0: interface rows degenerate to smoothness

    for (double sign : {-1.0, +1.0}) {
        for (int presc : {+1, -1}) {
            auto fld = [&](double t, double x) -> cplx {
                return rosales_direct(lam, 0, presc, t, x, grid) +
                       sign * g * rosales_direct(lam, 1, presc, t, x, grid);
            };
            GridField f(geom, mp);
            f.fill([&](double x) { return fld(0.0, x); });
            evolve(f, 0.4, {}, 1);
            double num = 0.0, den = 0.0;
            for (int j = 0; j < f.size(); ++j) {
                const double x = f.x_of(j);
                if (std::abs(x) > geom.X - 2.0) continue;
                const cplx sv = fld(f.time(), x);
                num += std::norm(f.values()[static_cast<std::size_t>(j)] - sv);
                den += std::norm(sv);
            }
            std::printf("sign %+.0f presc %+d : rel L2 deviation = %.4e\n", sign, presc,
                        std::sqrt(num / den));
        }
    }
    return 0;
}
