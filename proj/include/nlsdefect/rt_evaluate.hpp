#pragma once

#include <functional>
#include <map>
#include <stdexcept>

#include "nlsdefect/quadrature.hpp"
#include "nlsdefect/rt_algebra.hpp"

// Numeric evaluation of scalar-distribution expressions: every free momentum
// variable is bound either to a fixed real or to a weighted integration
// int dp/2pi w(p) (...); delta factors collapse one integration each, with
// the 2 pi weight already carried by the term coefficients.

namespace nlsdefect::rt {

struct Binding {
    enum Kind { fixed, integrate } kind = integrate;
    double value = 0.0;                         // for fixed
    std::function<cplx(double)> weight;         // for integrate
};

using Bindings = std::map<int, Binding>;

namespace detail {

struct Resolution {
    // var -> (root, sign) with x_var = sign * x_root, or fixed value
    std::map<int, std::pair<int, int>> alias;
    std::map<int, double> fixedv;

    std::pair<int, int> find(int v) {
        auto it = alias.find(v);
        if (it == alias.end()) return {v, +1};
        auto [r, s] = find(it->second.first);
        return {r, s * it->second.second};
    }
};

}  // namespace detail

// Evaluate one scalar term (no generator atoms) under the bindings.
inline cplx evaluate_term(const Term& term, const Bindings& bindings, const ModelParams& mp,
                          const MomentumGrid& grid) {
    if (!term.word.empty())
        throw std::invalid_argument("evaluate_term: expression still carries generators");

    detail::Resolution res;
    // Each delta eliminates one dp/2pi integration; the 2 pi delta weight in
    // the coefficient and the removed measure combine to this prefactor.
    cplx delta_measure = 1.0;
    // collapse deltas
    for (const auto& d : term.deltas) {
        delta_measure /= two_pi;
        auto [ra, sa0] = res.find(d.a.var);
        auto [rb, sb0] = res.find(d.b.var);
        const int sa = d.a.sign * sa0;
        const int sb = d.b.sign * sb0;
        // constraint sa x_ra + sb x_rb = 0
        const bool fa = res.fixedv.count(ra) > 0;
        const bool fb = res.fixedv.count(rb) > 0;
        auto bfixed = [&](int root) -> bool {
            auto it = bindings.find(root);
            return it != bindings.end() && it->second.kind == Binding::fixed;
        };
        const double va = fa ? res.fixedv[ra] : (bfixed(ra) ? bindings.at(ra).value : 0.0);
        const double vb = fb ? res.fixedv[rb] : (bfixed(rb) ? bindings.at(rb).value : 0.0);
        const bool xa_fixed = fa || bfixed(ra);
        const bool xb_fixed = fb || bfixed(rb);
        if (ra == rb) {
            if (sa + sb == 0) throw std::invalid_argument("evaluate_term: delta(0) divergence");
            // sa == sb: delta(2x) = delta(x)/2, x fixed to 0
            delta_measure *= 0.5;
            res.fixedv[ra] = 0.0;
            continue;
        }
        if (xa_fixed && xb_fixed) {
            throw std::invalid_argument(
                "evaluate_term: unresolvable delta between fixed momenta");
        }
        if (xa_fixed) {
            res.fixedv[rb] = -double(sa) * va / double(sb);
        } else if (xb_fixed) {
            res.fixedv[ra] = -double(sb) * vb / double(sa);
        } else {
            // alias rb := -(sa/sb) ra
            res.alias[rb] = {ra, -sa * sb};
        }
    }

    // gather variables of the term
    std::vector<int> vars;
    auto note = [&](int v) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    };
    for (const auto& f : term.scalars) {
        note(f.a.var);
        if (f.kind == ScalarFactor::S) note(f.b.var);
    }
    for (const auto& [v, b] : bindings) {
        (void)b;
        note(v);
    }

    // independent integration roots
    std::vector<int> roots;
    for (int v : vars) {
        auto [r, s] = res.find(v);
        (void)s;
        if (res.fixedv.count(r)) continue;
        auto it = bindings.find(r);
        const bool isfixed = it != bindings.end() && it->second.kind == Binding::fixed;
        if (isfixed) continue;
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    if (roots.size() > 3)
        throw std::invalid_argument("evaluate_term: more than 3 nested integrations");

    std::map<int, double> value;
    auto resolve = [&](int v) -> double {
        auto [r, s] = res.find(v);
        if (res.fixedv.count(r)) return s * res.fixedv[r];
        auto it = bindings.find(r);
        if (it != bindings.end() && it->second.kind == Binding::fixed)
            return s * it->second.value;
        return s * value.at(r);
    };

    // nested trapezoid over the roots with dp/2pi
    std::function<cplx(std::size_t)> nest = [&](std::size_t level) -> cplx {
        if (level == roots.size()) {
            cplx f = term.coeff * delta_measure;
            for (const auto& [v, b] : bindings) {
                if (b.kind != Binding::integrate) continue;
                f *= b.weight(resolve(v));
            }
            for (const auto& s : term.scalars) {
                const double x = s.a.sign * resolve(s.a.var);
                switch (s.kind) {
                    case ScalarFactor::S: {
                        const double y = s.b.sign * resolve(s.b.var);
                        f *= bulk_S(x + y, mp);
                        break;
                    }
                    case ScalarFactor::T: f *= defect_T(x, mp); break;
                    case ScalarFactor::R: f *= defect_R(x, mp); break;
                }
            }
            return f;
        }
        cplx acc = 0.0;
        const int r = roots[level];
        for (int i = 0; i < grid.size(); ++i) {
            value[r] = grid.node(i);
            acc += grid.weight(i) / two_pi * nest(level + 1);
        }
        value.erase(r);
        return acc;
    };
    return nest(0);
}

inline cplx evaluate_smeared(const Expression& scalar_expr, const Bindings& bindings,
                             const ModelParams& mp, const MomentumGrid& grid) {
    cplx acc = 0.0;
    for (const auto& t : scalar_expr.terms) acc += evaluate_term(t, bindings, mp, grid);
    return acc;
}

// vacuum matrix element of a generator word, smeared per the bindings
inline cplx smeared_vev(const Expression& word_expr, const Bindings& bindings,
                        const ModelParams& mp, const MomentumGrid& grid) {
    return evaluate_smeared(vacuum_expectation(word_expr), bindings, mp, grid);
}

// ---- two-point function ---------------------------------------------------

struct TwoPointResult {
    cplx value{0.0};
    Expression integrand;  // vacuum expectation of the zeroth-order fields
};

// <Omega, Phi(t1,x1) Phi^dag(t2,x2) Omega> restricted to the zeroth order,
// evaluated with a Gaussian regulator exp(-sigma p^2) on each momentum line.
inline TwoPointResult two_point(double t1, double x1, double t2, double x2,
                                const ModelParams& mp, double sigma, const MomentumGrid& grid) {
    if (!(sigma > 0.0)) throw std::invalid_argument("two_point: sigma must be > 0");
    if (x1 == 0.0 && x2 == 0.0) throw std::invalid_argument("two_point: (x1,x2) = (0,0)");
    const int a = x1 >= 0.0 ? +1 : -1;
    const int b = x2 >= 0.0 ? +1 : -1;
    Expression w = Expression::word({make_a(a, {1, +1}), make_adag(b, {2, +1})});
    TwoPointResult out;
    out.integrand = vacuum_expectation(w);
    Bindings bind;
    bind[1] = {Binding::integrate, 0.0, [=](double p) {
                   return std::exp(iu * (p * x1 - p * p * t1) - 0.5 * sigma * p * p);
               }};
    bind[2] = {Binding::integrate, 0.0, [=](double p) {
                   return std::exp(-iu * (p * x2 - p * p * t2) - 0.5 * sigma * p * p);
               }};
    out.value = evaluate_smeared(out.integrand, bind, mp, grid);
    return out;
}

}  // namespace nlsdefect::rt
