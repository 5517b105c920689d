#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nlsdefect/quadrature.hpp"
#include "nlsdefect/spectral.hpp"

// Truncated Rosales series for the half-line fields Phi_alpha(t, x):
//
//   Phi_a^{(n)}(t,x) = int prod_i dp_i/2pi prod_j dq_j/2pi
//       conj(lambda_a)(p_1..p_n) lambda_a(q_n..q_0)
//       e^{i sum_j (q_j x - q_j^2 t) - i sum_i (p_i x - p_i^2 t)}
//       / prod_i (p_i - q_{i-1} - i a eps)(p_i - q_i - i a eps)
//
// Each q_j couples at most two p's, so the integral collapses to one-
// dimensional Cauchy transforms chained through partial fractions; the
// i a eps prescription is evaluated at eps = 0+ directly, with a finite-eps
// ladder retained for Richardson consistency diagnostics.

namespace nlsdefect {

struct FieldSample {
    double t = 0.0;
    double x = 0.0;
    cplx value{0.0};
    int order = 0;
    double est_error = 0.0;
};

struct RosalesResult {
    cplx value{0.0};       // eps -> 0+ evaluation
    cplx dvalue_dx{0.0};   // exact x-derivative (if requested)
    double est_error = 0.0;
    std::vector<std::pair<double, cplx>> ladder;  // (eps, value) diagnostics
};

namespace detail {

// Samples of g(q) = lambda_a(q) e^{i(qx - q^2 t)} and derivatives, plus the
// momentum-weighted variant i q g(q) used for x-derivatives.
struct SlotData {
    SampledFunction g;    // g, g', g''
    SampledFunction qg;   // i q g and derivatives
    double gmax = 0.0;
};

inline SlotData sample_slot(const MomentumGrid& grid, const SpectralProfiles& sp, HalfLine alpha,
                            double t, double x, int max_order) {
    SlotData d;
    d.g = SampledFunction::from(
        grid,
        [&](double q, int order) -> cplx {
            const cplx l0 = sp.lambda(alpha, q, 0);
            const cplx ph = std::exp(iu * (q * x - q * q * t));
            if (order == 0) return l0 * ph;
            const cplx l1 = sp.lambda(alpha, q, 1);
            const cplx ip1 = iu * (x - 2.0 * q * t);
            if (order == 1) return (l1 + l0 * ip1) * ph;
            const cplx l2 = sp.lambda(alpha, q, 2);
            return (l2 + 2.0 * l1 * ip1 + l0 * (ip1 * ip1 - 2.0 * iu * t)) * ph;
        },
        max_order);
    const std::size_t n = d.g.g.size();
    d.qg.g.resize(n);
    d.qg.g1.resize(n);
    if (max_order >= 2) d.qg.g2.resize(n);
    for (int j = 0; j < grid.size(); ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double q = grid.node(j);
        d.qg.g[js] = iu * q * d.g.g[js];
        d.qg.g1[js] = iu * d.g.g[js] + iu * q * d.g.g1[js];
        if (max_order >= 2) d.qg.g2[js] = 2.0 * iu * d.g.g1[js] + iu * q * d.g.g2[js];
        d.gmax = std::max(d.gmax, std::abs(d.g.g[js]));
    }
    return d;
}

// Cauchy transform wrapper: falls back to a punctured sum at the two edge
// nodes, where the subtraction's log moment is singular and g is negligible.
inline cplx transform_at(const MomentumGrid& grid, const SampledFunction& s, int ip, int alpha,
                         double eps) {
    if (ip == 0 || ip == grid.size() - 1) {
        cplx acc = 0.0;
        const double p = grid.node(ip);
        for (int j = 0; j < grid.size(); ++j) {
            if (j == ip) continue;
            acc += grid.weight(j) * s.g[static_cast<std::size_t>(j)] /
                   (cplx(p - grid.node(j)) - iu * double(alpha) * eps);
        }
        return acc;
    }
    return cauchy_transform(grid, s, ip, alpha, eps);
}

struct TermEval {
    cplx value{0.0};
    cplx dx{0.0};
};

// Evaluate the order-n term (and optionally its x-derivative) at fixed eps.
inline TermEval eval_term(const MomentumGrid& grid, const SlotData& d, int n, int alpha,
                          double eps, bool want_dx) {
    const double inv2pi = 1.0 / two_pi;
    TermEval out;
    if (n == 0) {
        cplx v = 0.0, vx = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
            const auto js = static_cast<std::size_t>(j);
            v += grid.weight(j) * d.g.g[js];
            if (want_dx) vx += grid.weight(j) * d.qg.g[js];
        }
        out.value = inv2pi * v;
        out.dx = inv2pi * vx;
        return out;
    }

    const int M = grid.size();
    const double cutoff = 1e-18 * std::max(d.gmax, 1e-300);
    std::vector<cplx> C(static_cast<std::size_t>(M), cplx(0.0));
    std::vector<cplx> C1;  // transform of i q g (x-derivative route)
    std::vector<char> active(static_cast<std::size_t>(M), 0);
    if (want_dx) C1.assign(static_cast<std::size_t>(M), cplx(0.0));
    for (int i = 0; i < M; ++i) {
        const auto is = static_cast<std::size_t>(i);
        if (std::abs(d.g.g[is]) < cutoff) continue;
        active[is] = 1;
        C[is] = inv2pi * transform_at(grid, d.g, i, alpha, eps);
        if (want_dx) C1[is] = inv2pi * transform_at(grid, d.qg, i, alpha, eps);
    }

    if (n == 1) {
        cplx v = 0.0, vx = 0.0;
        for (int i = 0; i < M; ++i) {
            const auto is = static_cast<std::size_t>(i);
            if (!active[is]) continue;
            const cplx hbar = std::conj(d.g.g[is]);
            const double w = grid.weight(i);
            v += w * hbar * C[is] * C[is];
            if (want_dx) {
                const double p = grid.node(i);
                vx += w * hbar * (2.0 * C1[is] * C[is] - iu * p * C[is] * C[is]);
            }
        }
        out.value = inv2pi * v;
        out.dx = inv2pi * vx;
        return out;
    }

    if (n == 2) {
        // Diagonal of the shared-q divided difference needs dC/dp.
        std::vector<cplx> Cd(static_cast<std::size_t>(M), cplx(0.0));
        std::vector<cplx> C1d;
        if (want_dx) C1d.assign(static_cast<std::size_t>(M), cplx(0.0));
        for (int i = 1; i + 1 < M; ++i) {
            const auto is = static_cast<std::size_t>(i);
            if (!active[is]) continue;
            Cd[is] = inv2pi * cauchy_transform_deriv(grid, d.g, i, alpha, eps);
            if (want_dx) C1d[is] = inv2pi * cauchy_transform_deriv(grid, d.qg, i, alpha, eps);
        }
        cplx v = 0.0, vx = 0.0;
        for (int i = 0; i < M; ++i) {
            const auto is = static_cast<std::size_t>(i);
            if (!active[is]) continue;
            const cplx hbar_i = std::conj(d.g.g[is]);
            const double wi = grid.weight(i);
            const double pi_ = grid.node(i);
            for (int j = 0; j < M; ++j) {
                const auto js = static_cast<std::size_t>(j);
                if (!active[js]) continue;
                const cplx hbar_j = std::conj(d.g.g[js]);
                const double wj = grid.weight(j);
                const double pj = grid.node(j);
                cplx dd, dd1;
                if (i == j) {
                    dd = -Cd[is];
                    if (want_dx) dd1 = -C1d[is];
                } else {
                    const double inv = 1.0 / (pi_ - pj);
                    dd = (C[js] - C[is]) * inv;
                    if (want_dx) dd1 = (C1[js] - C1[is]) * inv;
                }
                const cplx common = wi * wj * hbar_i * hbar_j;
                v += common * C[is] * dd * C[js];
                if (want_dx) {
                    vx += common * (C1[is] * dd * C[js] + C[is] * dd1 * C[js] +
                                    C[is] * dd * C1[js] - iu * (pi_ + pj) * C[is] * dd * C[js]);
                }
            }
        }
        out.value = inv2pi * inv2pi * v;
        out.dx = inv2pi * inv2pi * vx;
        return out;
    }
    throw std::invalid_argument("rosales term order > 2 not supported");
}

}  // namespace detail

// Order-n Rosales term, stripped of its (-g)^n prefactor.
inline RosalesResult rosales_term(int n, HalfLine alpha, double t, double x,
                                  const SpectralProfiles& profiles, const Quadrature& quad,
                                  bool want_dx = false) {
    quad.validate();
    if (n < 0 || n > quad.max_order)
        throw std::invalid_argument("rosales_term: order outside configured range");
    if (x * sign(alpha) < 0.0)
        throw std::invalid_argument("rosales_term: x must lie on the alpha half-line");
    const MomentumGrid grid(quad);
    const auto slot = detail::sample_slot(grid, profiles, alpha, t, x, n >= 2 ? 2 : 1);

    RosalesResult r;
    const auto exact = detail::eval_term(grid, slot, n, sign(alpha), 0.0, want_dx);
    r.value = exact.value;
    r.dvalue_dx = exact.dx;
    if (n >= 1) {
        for (double e : quad.eps_ladder) {
            const auto le = detail::eval_term(grid, slot, n, sign(alpha), e, false);
            r.ladder.emplace_back(e, le.value);
        }
        const auto extrap = neville_to_zero(r.ladder);
        r.est_error = std::abs(extrap.value - r.value) + extrap.error_estimate * 0.1;
    } else {
        r.est_error = 1e-15 * std::max(1.0, std::abs(r.value));
    }
    return r;
}

// Field value Phi(t,x) = theta(x) Phi_+ + theta(-x) Phi_-, theta(0) = 1/2.
inline FieldSample field_value(double t, double x, const SpectralProfiles& profiles, int N,
                               const Quadrature& quad, bool want_dx = false,
                               cplx* dx_out = nullptr) {
    if (N < 0 || N > quad.max_order)
        throw std::invalid_argument("field_value: truncation outside configured range");
    FieldSample s;
    s.t = t;
    s.x = x;
    s.order = N;
    const double g = profiles.params().g;
    auto accumulate = [&](HalfLine a, double xx) {
        cplx v = 0.0, vx = 0.0;
        double err = 0.0;
        double gn = 1.0;
        for (int n = 0; n <= N; ++n) {
            const auto term = rosales_term(n, a, t, xx, profiles, quad, want_dx);
            v += gn * term.value;
            vx += gn * term.dvalue_dx;
            err += std::abs(gn) * term.est_error;
            gn *= -g;
        }
        return std::tuple<cplx, cplx, double>(v, vx, err);
    };
    if (x > 0.0) {
        auto [v, vx, e] = accumulate(HalfLine::plus, x);
        s.value = v;
        s.est_error = e;
        if (dx_out) *dx_out = vx;
    } else if (x < 0.0) {
        auto [v, vx, e] = accumulate(HalfLine::minus, x);
        s.value = v;
        s.est_error = e;
        if (dx_out) *dx_out = vx;
    } else {
        auto [vp, vxp, ep] = accumulate(HalfLine::plus, 0.0);
        auto [vm, vxm, em] = accumulate(HalfLine::minus, 0.0);
        s.value = 0.5 * (vp + vm);
        s.est_error = 0.5 * (ep + em);
        if (dx_out) *dx_out = 0.5 * (vxp + vxm);
    }
    return s;
}

struct BoundaryResiduals {
    double continuity = 0.0;
    double jump = 0.0;
    double continuity_err = 0.0;
    double jump_err = 0.0;
};

// One-sided limits at the defect, Richardson-extrapolated in the offset h.
inline BoundaryResiduals boundary_residuals(double t, const SpectralProfiles& profiles, int N,
                                            const Quadrature& quad, double h0 = 0.0) {
    if (h0 <= 0.0) h0 = quad.h0;
    const double r = quad.h_ratio;
    const std::vector<double> hs = {r * r * h0, r * h0, h0};

    const double g = profiles.params().g;
    auto phi_side = [&](HalfLine a, double xx, cplx* dxv) {
        cplx v = 0.0, vx = 0.0;
        double gn = 1.0;
        for (int n = 0; n <= N; ++n) {
            const auto term = rosales_term(n, a, t, xx, profiles, quad, true);
            v += gn * term.value;
            vx += gn * term.dvalue_dx;
            gn *= -g;
        }
        if (dxv) *dxv = vx;
        return v;
    };

    cplx dxp0, dxm0;
    const cplx phi0 = 0.5 * (phi_side(HalfLine::plus, 0.0, &dxp0) +
                             phi_side(HalfLine::minus, 0.0, &dxm0));

    std::vector<std::pair<double, cplx>> cont, jump;
    for (double h : hs) {
        cplx dxp, dxm;
        const cplx vp = phi_side(HalfLine::plus, h, &dxp);
        const cplx vm = phi_side(HalfLine::minus, -h, &dxm);
        cont.emplace_back(h, vp - vm);
        jump.emplace_back(h, dxp - dxm - 2.0 * profiles.params().eta * phi0);
    }
    const auto ce = neville_to_zero(cont);
    const auto je = neville_to_zero(jump);
    BoundaryResiduals out;
    out.continuity = std::abs(ce.value);
    out.jump = std::abs(je.value);
    out.continuity_err = ce.error_estimate;
    out.jump_err = je.error_estimate;
    return out;
}

// Finite-difference residual of (i d_t + d_x^2) Phi - 2 g |Phi|^2 Phi at (t, x).
inline cplx eom_residual(double t, double x, const SpectralProfiles& profiles, int N,
                         const Quadrature& quad, double dt_fd = 2e-3, double dx_fd = 2e-3) {
    if (x == 0.0) throw std::invalid_argument("eom_residual: x must be nonzero");
    auto phi = [&](double tt, double xx) { return field_value(tt, xx, profiles, N, quad).value; };
    const cplx p0 = phi(t, x);
    const cplx pt = (phi(t + dt_fd, x) - phi(t - dt_fd, x)) / (2.0 * dt_fd);
    const cplx pxx = (phi(t, x + dx_fd) - 2.0 * p0 + phi(t, x - dx_fd)) / (dx_fd * dx_fd);
    const double g = profiles.params().g;
    return iu * pt + pxx - 2.0 * g * std::norm(p0) * p0;
}

// E_RT = int over both half-lines (|d_x Phi|^2 + g |Phi|^4) dx + 2 eta |Phi(t,0)|^2.
// The derivative jumps at x = 0, so each half-line quadrature uses its own
// one-sided endpoint value there.
inline double energy(double t, const SpectralProfiles& profiles, int N, const Quadrature& quad,
                     double X = 0.0, int nx_half = 240) {
    if (X <= 0.0) X = std::max(12.0, 4.0 + 2.0 * profiles.support_radius() * std::abs(t) + 8.0);
    const double g = profiles.params().g;
    auto density_side = [&](double x, HalfLine side) {
        cplx v = 0.0, vx = 0.0;
        double gn = 1.0;
        for (int n = 0; n <= N; ++n) {
            const auto term = rosales_term(n, side, t, x, profiles, quad, true);
            v += gn * term.value;
            vx += gn * term.dvalue_dx;
            gn *= -g;
        }
        return std::norm(vx) + g * std::norm(v) * std::norm(v);
    };
    auto simpson_half = [&](double a, double b, HalfLine side) {
        const int n = nx_half % 2 == 0 ? nx_half : nx_half + 1;
        const double h = (b - a) / n;
        double acc = density_side(a, side) + density_side(b, side);
        for (int j = 1; j < n; ++j) acc += density_side(a + j * h, side) * ((j % 2 == 1) ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    const double bulk =
        simpson_half(-X, 0.0, HalfLine::minus) + simpson_half(0.0, X, HalfLine::plus);
    const cplx phi0 = field_value(t, 0.0, profiles, N, quad).value;
    return bulk + 2.0 * profiles.params().eta * std::norm(phi0);
}

}  // namespace nlsdefect
