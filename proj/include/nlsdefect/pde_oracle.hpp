#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nlsdefect/classical_field.hpp"

// Brute-force time integrator for the delta-defect NLS boundary problem:
// Crank-Nicolson on each half-line, a doubled node at x = 0 carrying the two
// interface equations (continuity and the derivative jump 2 eta Phi(0)), one
// Picard sweep per step for the cubic term, Dirichlet far-field walls.

namespace nlsdefect {

struct OracleGrid {
    double X = 30.0;    // domain [-X, X]
    double dx = 0.01;
    double dt = 2e-4;

    void validate() const {
        if (!(X > 1.0) || !(dx > 0.0) || !(dt > 0.0))
            throw std::invalid_argument("OracleGrid: bad geometry");
        if (dt > 2.0 * dx * dx + 1e-12)
            throw std::invalid_argument("OracleGrid: dt should satisfy dt <~ dx^2");
    }
};

class GridField {
  public:
    GridField(const OracleGrid& geom, const ModelParams& mp) : geom_(geom), mp_(mp) {
        geom.validate();
        mp.validate();
        nhalf_ = static_cast<int>(std::round(geom.X / geom.dx));
        n_ = 2 * nhalf_ + 2;  // doubled node at x = 0
        u_.assign(static_cast<std::size_t>(n_), cplx(0.0));
    }

    // node layout: j = 0..nhalf_ -> x = -X .. 0 (left 0 at j = nhalf_),
    //              j = nhalf_+1..n-1 -> x = 0 .. X (right 0 at j = nhalf_+1)
    int size() const { return n_; }
    int left_zero() const { return nhalf_; }
    int right_zero() const { return nhalf_ + 1; }
    double x_of(int j) const {
        return j <= nhalf_ ? -geom_.X + j * geom_.dx : (j - nhalf_ - 1) * geom_.dx;
    }
    const OracleGrid& geom() const { return geom_; }
    const ModelParams& params() const { return mp_; }
    double time() const { return t_; }
    void set_time(double t) { t_ = t; }
    std::vector<cplx>& values() { return u_; }
    const std::vector<cplx>& values() const { return u_; }

    void fill(const std::function<cplx(double)>& f) {
        for (int j = 0; j < n_; ++j) u_[static_cast<std::size_t>(j)] = f(x_of(j));
        // interface consistency: average the two zero-node values
        const cplx mid = 0.5 * (u_[static_cast<std::size_t>(left_zero())] +
                                u_[static_cast<std::size_t>(right_zero())]);
        u_[static_cast<std::size_t>(left_zero())] = mid;
        u_[static_cast<std::size_t>(right_zero())] = mid;
    }

    double mass() const {  // int |Phi|^2
        double acc = 0.0;
        for (int j = 0; j + 1 < n_; ++j) {
            if (j == left_zero()) continue;  // the doubled node spans zero width
            acc += 0.5 * (std::norm(u_[static_cast<std::size_t>(j)]) +
                          std::norm(u_[static_cast<std::size_t>(j + 1)])) *
                   geom_.dx;
        }
        return acc;
    }

    double interface_continuity() const {
        return std::abs(u_[static_cast<std::size_t>(left_zero())] -
                        u_[static_cast<std::size_t>(right_zero())]);
    }

    double interface_jump() const {
        const double h = geom_.dx;
        const auto& u = u_;
        const int L = left_zero(), R = right_zero();
        const cplx dxr = (-3.0 * u[static_cast<std::size_t>(R)] +
                          4.0 * u[static_cast<std::size_t>(R + 1)] -
                          u[static_cast<std::size_t>(R + 2)]) /
                         (2.0 * h);
        const cplx dxl = (3.0 * u[static_cast<std::size_t>(L)] -
                          4.0 * u[static_cast<std::size_t>(L - 1)] +
                          u[static_cast<std::size_t>(L - 2)]) /
                         (2.0 * h);
        return std::abs(dxr - dxl - 2.0 * mp_.eta * u[static_cast<std::size_t>(R)]);
    }

    // discrete E_RT: |d_x Phi|^2 + g |Phi|^4 over both half-lines + 2 eta |Phi(0)|^2
    double energy() const {
        const double h = geom_.dx;
        double acc = 0.0;
        auto seg = [&](int a, int b) {
            for (int j = a; j < b; ++j) {
                const cplx d =
                    (u_[static_cast<std::size_t>(j + 1)] - u_[static_cast<std::size_t>(j)]) / h;
                const double phi4 =
                    0.5 * (std::norm(u_[static_cast<std::size_t>(j)]) *
                               std::norm(u_[static_cast<std::size_t>(j)]) +
                           std::norm(u_[static_cast<std::size_t>(j + 1)]) *
                               std::norm(u_[static_cast<std::size_t>(j + 1)]));
                acc += (std::norm(d) + mp_.g * phi4) * h;
            }
        };
        seg(0, left_zero());
        seg(right_zero(), n_ - 1);
        acc += 2.0 * mp_.eta * std::norm(u_[static_cast<std::size_t>(right_zero())]);
        return acc;
    }

  private:
    OracleGrid geom_;
    ModelParams mp_;
    int nhalf_ = 0, n_ = 0;
    double t_ = 0.0;
    std::vector<cplx> u_;
};

namespace detail {

// General banded solver with partial pivoting; bandwidth kl = ku = 2.
class BandedSolver {
  public:
    BandedSolver(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), rows_(static_cast<std::size_t>(n)) {
        for (auto& r : rows_) r.assign(static_cast<std::size_t>(2 * kl_ + ku_ + 1), cplx(0.0));
        piv_.assign(static_cast<std::size_t>(n), 0);
    }

    // column index j stored at offset j - i + kl; pivoting fill-in widens the
    // upper band to kl + ku, hence the 2 kl + ku + 1 row width.
    void set(int i, int j, cplx v) {
        rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i + kl_)] = v;
    }

    void factor() {
        const int wid = 2 * kl_ + ku_ + 1;
        for (int c = 0; c < n_; ++c) {
            int pr = c;
            double best = std::abs(at(c, c));
            for (int r = c + 1; r <= std::min(n_ - 1, c + kl_); ++r) {
                const double a = std::abs(at(r, c));
                if (a > best) {
                    best = a;
                    pr = r;
                }
            }
            if (best == 0.0) throw std::runtime_error("BandedSolver: singular matrix");
            piv_[static_cast<std::size_t>(c)] = pr;
            if (pr != c) swap_rows(c, pr, c);
            const cplx d = at(c, c);
            for (int r = c + 1; r <= std::min(n_ - 1, c + kl_); ++r) {
                const cplx m = at(r, c) / d;
                set_mult(r, c, m);
                for (int j = c + 1; j <= std::min(n_ - 1, c + kl_ + ku_); ++j)
                    add(r, j, -m * at(c, j));
            }
        }
        (void)wid;
    }

    void solve(std::vector<cplx>& b) const {
        for (int c = 0; c < n_; ++c) {
            const int pr = piv_[static_cast<std::size_t>(c)];
            if (pr != c) std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(pr)]);
            for (int r = c + 1; r <= std::min(n_ - 1, c + kl_); ++r)
                b[static_cast<std::size_t>(r)] -= mult(r, c) * b[static_cast<std::size_t>(c)];
        }
        for (int r = n_ - 1; r >= 0; --r) {
            cplx acc = b[static_cast<std::size_t>(r)];
            for (int j = r + 1; j <= std::min(n_ - 1, r + kl_ + ku_); ++j)
                acc -= at(r, j) * b[static_cast<std::size_t>(j)];
            b[static_cast<std::size_t>(r)] = acc / at(r, r);
        }
    }

  private:
    cplx at(int i, int j) const {
        const int off = j - i + kl_;
        if (off < 0 || off >= 2 * kl_ + ku_ + 1) return 0.0;
        return rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(off)];
    }
    void add(int i, int j, cplx v) {
        rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i + kl_)] += v;
    }
    void swap_rows(int a, int b, int from_col) {
        for (int j = from_col; j <= std::min(n_ - 1, from_col + kl_ + ku_); ++j) {
            const cplx t = at(a, j);
            set(a, j, at(b, j));
            set(b, j, t);
        }
    }
    // multipliers stowed below the diagonal band
    void set_mult(int i, int j, cplx m) { set(i, j, m); }
    cplx mult(int i, int j) const { return at(i, j); }

    int n_, kl_, ku_;
    std::vector<std::vector<cplx>> rows_;
    std::vector<int> piv_;
};

}  // namespace detail

struct EvolveReport {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> energy;
    std::vector<double> continuity;
    std::vector<double> jump;
};

// One Crank-Nicolson step. The cubic term is frozen at a midpoint density
// obtained by one Picard refresh: solve with |u^m|^2, recompute the density
// from the average, solve once more.
inline void oracle_step(GridField& f) {
    const auto& geom = f.geom();
    const auto& mp = f.params();
    const int n = f.size();
    const int L = f.left_zero(), R = f.right_zero();
    const double h = geom.dx, dt = geom.dt;
    auto& u = f.values();
    const cplx idt = iu / dt;

    // (i/dt - H/2) u^{m+1} = (i/dt + H/2) u^m,  H = -d_x^2 + 2 g dens
    auto solve_with = [&](const std::vector<double>& dens) {
        detail::BandedSolver slv(n, 3, 3);
        std::vector<cplx> rhs(static_cast<std::size_t>(n), cplx(0.0));
        for (int j = 0; j < n; ++j) {
            const auto js = static_cast<std::size_t>(j);
            if (j == 0 || j == n - 1) {  // Dirichlet walls
                slv.set(j, j, 1.0);
                rhs[js] = 0.0;
                continue;
            }
            if (j == L) {  // continuity row: u(0-) - u(0+) = 0
                slv.set(j, L, 1.0);
                slv.set(j, R, -1.0);
                rhs[js] = 0.0;
                continue;
            }
            if (j == R) {  // jump row: dxr - dxl - 2 eta u(0) = 0 (times -1)
                const double c = 1.0 / (2.0 * h);
                slv.set(j, R, 3.0 * c + 2.0 * mp.eta);
                slv.set(j, R + 1, -4.0 * c);
                slv.set(j, R + 2, 1.0 * c);
                slv.set(j, L, 3.0 * c);
                slv.set(j, L - 1, -4.0 * c);
                slv.set(j, L - 2, 1.0 * c);
                rhs[js] = 0.0;
                continue;
            }
            const double v = mp.g * dens[js];  // half the 2 g |Phi|^2 potential
            const cplx offd = cplx(0.5 / (h * h));
            slv.set(j, j - 1, offd);
            slv.set(j, j, idt - 1.0 / (h * h) - v);
            slv.set(j, j + 1, offd);
            rhs[js] = idt * u[js] -
                      0.5 * (u[js - 1] - 2.0 * u[js] + u[js + 1]) / (h * h) + v * u[js];
        }
        slv.factor();
        slv.solve(rhs);
        return rhs;
    };

    std::vector<double> dens(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        dens[static_cast<std::size_t>(j)] = std::norm(u[static_cast<std::size_t>(j)]);
    std::vector<cplx> pred = solve_with(dens);
    for (int j = 0; j < n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        dens[js] = std::norm(0.5 * (u[js] + pred[js]));
    }
    std::vector<cplx> next = solve_with(dens);

    double norm_new = 0.0, norm_old = 0.0;
    for (int j = 0; j < n; ++j) {
        norm_new += std::norm(next[static_cast<std::size_t>(j)]);
        norm_old += std::norm(u[static_cast<std::size_t>(j)]);
    }
    if (norm_new > 100.0 * norm_old + 1e-12)
        throw std::runtime_error("oracle_step: divergence detected (norm grew > 10x)");

    u = std::move(next);
    f.set_time(f.time() + dt);
}

inline EvolveReport evolve(GridField& f, double t_final,
                           const std::function<void(const GridField&)>& on_checkpoint = {},
                           int checkpoints = 10) {
    EvolveReport rep;
    const double t0 = f.time();
    const int steps = static_cast<int>(std::ceil((t_final - t0) / f.geom().dt - 1e-12));
    const int every = std::max(1, steps / std::max(1, checkpoints));
    auto record = [&]() {
        rep.times.push_back(f.time());
        rep.mass.push_back(f.mass());
        rep.energy.push_back(f.energy());
        rep.continuity.push_back(f.interface_continuity());
        rep.jump.push_back(f.interface_jump());
        if (on_checkpoint) on_checkpoint(f);
    };
    record();
    for (int s = 0; s < steps; ++s) {
        oracle_step(f);
        if ((s + 1) % every == 0 || s + 1 == steps) record();
    }
    return rep;
}

inline double energy_drift(const EvolveReport& rep) {
    if (rep.energy.empty() || rep.energy.front() == 0.0) return 0.0;
    double d = 0.0;
    for (double e : rep.energy) d = std::max(d, std::abs(e - rep.energy.front()));
    return d / std::abs(rep.energy.front());
}

// Max relative L2 deviation between the oracle evolution of the series' own
// initial data and the series itself, over checkpoint times.
inline double compare_series(const SpectralProfiles& profiles, int N, const Quadrature& quad,
                             const OracleGrid& geom, double t_final, int checkpoints = 4) {
    GridField f(geom, profiles.params());
    f.fill([&](double x) { return field_value(0.0, x, profiles, N, quad).value; });
    double worst = 0.0;
    const double dt_chk = t_final / checkpoints;
    for (int c = 1; c <= checkpoints; ++c) {
        evolve(f, c * dt_chk, {}, 1);
        double num = 0.0, den = 0.0;
        for (int j = 0; j < f.size(); ++j) {
            const double x = f.x_of(j);
            if (std::abs(x) > geom.X - 2.0) continue;
            const cplx s = field_value(f.time(), x, profiles, N, quad).value;
            num += std::norm(f.values()[static_cast<std::size_t>(j)] - s);
            den += std::norm(s);
        }
        worst = std::max(worst, std::sqrt(num / std::max(den, 1e-300)));
    }
    return worst;
}

}  // namespace nlsdefect
