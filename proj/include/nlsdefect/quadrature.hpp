#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nlsdefect/kernels.hpp"

// Momentum grids and the regularized Cauchy transforms
//     H(p) = int_{-P}^{P} g(q) / (p - q - i alpha eps) dq
// used throughout the series evaluation. Poles are handled by second-order
// subtraction: the singular part integrates in closed form, the remainder is
// smooth and integrated by the trapezoid rule with Euler-Maclaurin edge
// corrections. eps = 0 evaluates the one-sided limit directly.

namespace nlsdefect {

struct Quadrature {
    double P = 8.0;                                   // integrate momenta over [-P, P]
    int M = 257;                                      // nodes per dimension, odd
    std::vector<double> eps_ladder = {0.18, 0.03, 0.005};  // descending regulator ladder
    double h0 = 1e-3;                                 // base step for one-sided x limits
    double h_ratio = 4.0;                             // ladder ratio for x-limits
    int max_order = 2;                                // largest Rosales order evaluated

    void validate() const {
        if (!(P > 0.0)) throw std::invalid_argument("Quadrature: P must be > 0");
        if (M < 9 || M % 2 == 0) throw std::invalid_argument("Quadrature: M must be odd and >= 9");
        if (eps_ladder.empty()) throw std::invalid_argument("Quadrature: empty eps ladder");
        for (std::size_t i = 0; i + 1 < eps_ladder.size(); ++i)
            if (!(eps_ladder[i] > eps_ladder[i + 1]) || !(eps_ladder[i + 1] > 0.0))
                throw std::invalid_argument("Quadrature: eps ladder must decrease and stay > 0");
        if (!(h0 > 0.0)) throw std::invalid_argument("Quadrature: h0 must be > 0");
    }
};

class MomentumGrid {
  public:
    MomentumGrid(double P, int M) : P_(P), M_(M) {
        if (M < 9 || M % 2 == 0)
            throw std::invalid_argument("MomentumGrid: M must be odd and >= 9");
        dp_ = 2.0 * P / (M - 1);
        nodes_.resize(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) nodes_[static_cast<std::size_t>(i)] = -P + dp_ * i;
        nodes_[static_cast<std::size_t>((M - 1) / 2)] = 0.0;
    }
    explicit MomentumGrid(const Quadrature& q) : MomentumGrid(q.P, q.M) {}

    double P() const { return P_; }
    int size() const { return M_; }
    double dp() const { return dp_; }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }
    int mirror(int i) const { return M_ - 1 - i; }
    double weight(int i) const { return (i == 0 || i == M_ - 1) ? 0.5 * dp_ : dp_; }

    bool operator==(const MomentumGrid& o) const { return P_ == o.P_ && M_ == o.M_; }

    template <typename F>
    cplx trapezoid(F&& f) const {
        cplx s = 0.0;
        for (int i = 0; i < M_; ++i) s += weight(i) * f(node(i));
        return s;
    }

  private:
    double P_;
    int M_;
    double dp_;
    std::vector<double> nodes_;
};

// Samples of a smooth function and its first two derivatives on a grid.
struct SampledFunction {
    std::vector<cplx> g, g1, g2;

    template <typename F>
    static SampledFunction from(const MomentumGrid& grid, F&& eval_with_order, int max_order = 2) {
        SampledFunction s;
        const std::size_t n = static_cast<std::size_t>(grid.size());
        s.g.resize(n);
        if (max_order >= 1) s.g1.resize(n);
        if (max_order >= 2) s.g2.resize(n);
        for (int i = 0; i < grid.size(); ++i) {
            const double q = grid.node(i);
            s.g[static_cast<std::size_t>(i)] = eval_with_order(q, 0);
            if (max_order >= 1) s.g1[static_cast<std::size_t>(i)] = eval_with_order(q, 1);
            if (max_order >= 2) s.g2[static_cast<std::size_t>(i)] = eval_with_order(q, 2);
        }
        return s;
    }
};

namespace detail {
// int_{-P}^{P} (q - p)/(p - q - i a eps) dq
inline cplx linear_pole_moment(double P, double p, int alpha, double eps) {
    if (eps == 0.0) return -2.0 * P;
    const cplx ie = iu * double(alpha) * eps;
    return -2.0 * P + ie * std::log((P - p + ie) / (-P - p + ie));
}

// int_{-P}^{P} dq/(p - q - i a eps); eps = 0 gives the principal value + i pi alpha.
inline cplx log_pole_moment(double P, double p, int alpha, double eps) {
    if (eps == 0.0) {
        if (!(std::abs(p) < P)) throw std::invalid_argument("log_pole_moment: |p| >= P");
        return std::log((P + p) / (P - p)) + iu * pi * double(alpha);
    }
    const cplx ie = iu * double(alpha) * eps;
    return std::log((p + P - ie) / (p - P - ie));
}
}  // namespace detail

// H(p_i) with p_i = grid node. Requires g, g1 samples (g2 unused here).
inline cplx cauchy_transform(const MomentumGrid& grid, const SampledFunction& s, int ip, int alpha,
                             double eps) {
    const double p = grid.node(ip);
    const cplx gp = s.g[static_cast<std::size_t>(ip)];
    const cplx g1p = s.g1[static_cast<std::size_t>(ip)];
    const cplx ie = iu * double(alpha) * eps;
    cplx acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const double q = grid.node(j);
        cplx val;
        if (j == ip) {
            // remainder (g(q) - g(p) - (q-p) g'(p)) / (p - q - i a eps) -> 0 at q = p
            val = 0.0;
        } else {
            val = (s.g[static_cast<std::size_t>(j)] - gp - (q - p) * g1p) / (p - q - ie);
        }
        acc += grid.weight(j) * val;
    }
    // Euler-Maclaurin edge corrections. Outside the support the remainder is
    // exactly -g1p + Ce/(p - q - i a eps) with Ce = -gp + i a eps g1p; only the
    // pole tail contributes edge derivatives.
    const double dq = grid.dp();
    const cplx ce = -gp + ie * g1p;
    auto dpow = [&](double q, int n) { return std::pow(cplx(p - q) - ie, -n); };
    const cplx d1 = ce * (dpow(grid.P(), 2) - dpow(-grid.P(), 2));
    const cplx d3 = 6.0 * ce * (dpow(grid.P(), 4) - dpow(-grid.P(), 4));
    acc += -(dq * dq / 12.0) * d1 + (std::pow(dq, 4) / 720.0) * d3;
    acc += gp * detail::log_pole_moment(grid.P(), p, alpha, eps);
    acc += g1p * detail::linear_pole_moment(grid.P(), p, alpha, eps);
    return acc;
}

// dH/dp at a grid node; needs g2 samples.
inline cplx cauchy_transform_deriv(const MomentumGrid& grid, const SampledFunction& s, int ip,
                                   int alpha, double eps) {
    const double p = grid.node(ip);
    const cplx gp = s.g[static_cast<std::size_t>(ip)];
    const cplx g1p = s.g1[static_cast<std::size_t>(ip)];
    const cplx g2p = s.g2[static_cast<std::size_t>(ip)];
    const cplx ie = iu * double(alpha) * eps;
    cplx acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const double q = grid.node(j);
        cplx val;
        const cplx den = cplx(p - q) - ie;
        if (j == ip) {
            val = (eps == 0.0) ? -0.5 * g2p : (iu * double(alpha) * eps * g1p) / (den * den);
        } else {
            val = (-g1p * den - (s.g[static_cast<std::size_t>(j)] - gp)) / (den * den);
        }
        acc += grid.weight(j) * val;
    }
    const double dq = grid.dp();
    auto dpow = [&](double q, int n) { return std::pow(cplx(p - q) - ie, -n); };
    // edge model E ~ -g1(p)/(p-q) + g(p)/(p-q)^2
    const cplx e1 = -g1p * (dpow(grid.P(), 2) - dpow(-grid.P(), 2)) +
                    2.0 * gp * (dpow(grid.P(), 3) - dpow(-grid.P(), 3));
    const cplx e3 = -6.0 * g1p * (dpow(grid.P(), 4) - dpow(-grid.P(), 4)) +
                    24.0 * gp * (dpow(grid.P(), 5) - dpow(-grid.P(), 5));
    acc += -(dq * dq / 12.0) * e1 + (std::pow(dq, 4) / 720.0) * e3;
    const cplx L = detail::log_pole_moment(grid.P(), p, alpha, eps);
    cplx Lp;
    if (eps == 0.0)
        Lp = 1.0 / (grid.P() + p) + 1.0 / (grid.P() - p);
    else
        Lp = 1.0 / (p + grid.P() - ie) - 1.0 / (p - grid.P() - ie);
    acc += g1p * L + gp * Lp;
    return acc;
}

// Neville extrapolation of (eps, value) pairs to eps = 0.
struct Extrapolation {
    cplx value{0.0};
    double error_estimate = 0.0;
};

inline Extrapolation neville_to_zero(const std::vector<std::pair<double, cplx>>& pts) {
    if (pts.empty()) throw std::invalid_argument("neville_to_zero: no points");
    const std::size_t n = pts.size();
    std::vector<std::vector<cplx>> t(n, std::vector<cplx>(n, cplx(0.0)));
    for (std::size_t i = 0; i < n; ++i) t[i][0] = pts[i].second;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) {
            const double xi = pts[i].first;
            const double xij = pts[i - j].first;
            t[i][j] = (xij * t[i][j - 1] - xi * t[i - 1][j - 1]) / (xij - xi);
        }
    Extrapolation e;
    e.value = t[n - 1][n - 1];
    e.error_estimate = (n >= 2) ? std::abs(t[n - 1][n - 1] - t[n - 1][n - 2]) : 0.0;
    return e;
}

// Simple adaptive Simpson on [a, b] for complex integrands.
namespace detail {
inline cplx simpson(double a, double b, cplx fa, cplx fm, cplx fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}
inline cplx adaptive_simpson_rec(const std::function<cplx(double)>& f, double a, double b, cplx fa,
                                 cplx fm, cplx fb, cplx whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const cplx flm = f(lm), frm = f(rm);
    const cplx left = simpson(a, m, fa, flm, fm);
    const cplx right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace detail

inline cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b,
                             double tol = 1e-12, int depth = 24) {
    const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const cplx whole = detail::simpson(a, b, fa, fm, fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace nlsdefect
