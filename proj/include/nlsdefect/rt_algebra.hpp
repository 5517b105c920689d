#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlsdefect/kernels.hpp"

// Symbolic layer for the reflection-transmission exchange algebra: words in
// the bulk generators a_alpha(p), adag_alpha(p) and the defect generators
// r(p), t(p), with scalar kernel factors S/T/R of signed momentum arguments
// and 2 pi delta factors. normal_order() rewrites words into the canonical
// creators | defect | annihilators form using the exchange relations; labels
// are always concrete, so the delta/epsilon label tensors are expanded
// eagerly and vanishing terms never materialize.

namespace nlsdefect::rt {

// sign * k_var
struct Momentum {
    int var = 0;
    int sign = +1;

    Momentum negated() const { return {var, -sign}; }
    friend auto operator<=>(const Momentum&, const Momentum&) = default;
};

enum class AtomKind : int { create = 0, reflect = 1, transmit = 2, annihilate = 3 };

inline int order_class(AtomKind k) {
    switch (k) {
        case AtomKind::create: return 0;
        case AtomKind::reflect:
        case AtomKind::transmit: return 1;
        case AtomKind::annihilate: return 2;
    }
    return 3;
}

struct Atom {
    AtomKind kind;
    int label = 0;  // +1/-1 for bulk kinds, 0 for defect kinds
    Momentum mom;

    friend auto operator<=>(const Atom&, const Atom&) = default;

    // signed argument alpha * p carried into kernel coefficients
    Momentum signed_mom() const {
        return label == 0 ? mom : Momentum{mom.var, label * mom.sign};
    }
};

inline Atom make_a(int label, Momentum m) { return {AtomKind::annihilate, label, m}; }
inline Atom make_adag(int label, Momentum m) { return {AtomKind::create, label, m}; }
inline Atom make_r(Momentum m) { return {AtomKind::reflect, 0, m}; }
inline Atom make_t(Momentum m) { return {AtomKind::transmit, 0, m}; }

// Scalar kernel factor: S(a + b), T(a) or R(a) with signed momentum slots.
struct ScalarFactor {
    enum Kind : int { S = 0, T = 1, R = 2 } kind;
    Momentum a;
    Momentum b;  // only for S

    friend auto operator<=>(const ScalarFactor&, const ScalarFactor&) = default;

    static ScalarFactor s(Momentum x, Momentum y) {
        if (y < x) std::swap(x, y);
        return {S, x, y};
    }
    static ScalarFactor t(Momentum x) { return {T, x, {}}; }
    static ScalarFactor r(Momentum x) { return {R, x, {}}; }
};

// 2 pi delta(a + b); the weight 2 pi lives in the term coefficient.
struct DeltaFactor {
    Momentum a, b;

    friend auto operator<=>(const DeltaFactor&, const DeltaFactor&) = default;

    static DeltaFactor make(Momentum x, Momentum y) {
        if (x.var == y.var) throw std::invalid_argument("DeltaFactor: coincident variables");
        if (y.var < x.var) std::swap(x, y);
        if (x.sign < 0) {
            x.sign = -x.sign;
            y.sign = -y.sign;
        }
        return {x, y};
    }
};

struct Term {
    cplx coeff{1.0};
    std::vector<Atom> word;
    std::vector<ScalarFactor> scalars;
    std::vector<DeltaFactor> deltas;

    // Canonical reduction: substitute the delta constraints into all scalar
    // and generator arguments (towards the smallest variable id), then cancel
    // S(x) S(-x) pairs. Both steps preserve the distributional value.
    void canonicalize_factors() {
        std::map<int, std::pair<int, int>> parent;  // var -> (parent, relative sign)
        std::function<std::pair<int, int>(int)> find = [&](int v) -> std::pair<int, int> {
            auto it = parent.find(v);
            if (it == parent.end()) return {v, +1};
            auto [r, s] = find(it->second.first);
            return {r, s * it->second.second};
        };
        for (const auto& d : deltas) {
            auto [ra, sa] = find(d.a.var);
            auto [rb, sb] = find(d.b.var);
            const int ca = d.a.sign * sa, cb = d.b.sign * sb;
            if (ra == rb) continue;  // degenerate; left to the evaluator
            // ca x_ra + cb x_rb = 0  ->  x_big = -(ca cb) x_small
            if (ra < rb)
                parent[rb] = {ra, -ca * cb};
            else
                parent[ra] = {rb, -ca * cb};
        }
        auto subst = [&](Momentum m) {
            auto [r, s] = find(m.var);
            return Momentum{r, m.sign * s};
        };
        for (auto& a : word) a.mom = subst(a.mom);
        for (auto& f : scalars) {
            if (f.kind == ScalarFactor::S)
                f = ScalarFactor::s(subst(f.a), subst(f.b));
            else
                f.a = subst(f.a);
        }
        // cancel S(x) S(-x) pairs (exact unitarity of the bulk amplitude)
        std::sort(scalars.begin(), scalars.end());
        std::vector<char> dead(scalars.size(), 0);
        for (std::size_t i = 0; i < scalars.size(); ++i) {
            if (dead[i] || scalars[i].kind != ScalarFactor::S) continue;
            const ScalarFactor negated =
                ScalarFactor::s(scalars[i].a.negated(), scalars[i].b.negated());
            for (std::size_t j = i + 1; j < scalars.size(); ++j) {
                if (dead[j]) continue;
                if (scalars[j] == negated) {
                    dead[i] = dead[j] = 1;
                    break;
                }
            }
        }
        std::vector<ScalarFactor> kept;
        for (std::size_t i = 0; i < scalars.size(); ++i)
            if (!dead[i]) kept.push_back(scalars[i]);
        scalars = std::move(kept);
        std::sort(scalars.begin(), scalars.end());
        std::sort(deltas.begin(), deltas.end());
    }

    // structural key ignoring the coefficient
    auto key() const { return std::tie(word, scalars, deltas); }
};

struct Expression {
    std::vector<Term> terms;

    static Expression single(Term t) {
        Expression e;
        e.terms.push_back(std::move(t));
        return e;
    }
    static Expression word(std::vector<Atom> atoms, cplx coeff = 1.0) {
        Term t;
        t.coeff = coeff;
        t.word = std::move(atoms);
        return single(std::move(t));
    }

    Expression& operator+=(const Expression& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        return *this;
    }

    // merge structurally equal terms, drop negligible coefficients
    void combine(double tol = 1e-14) {
        for (auto& t : terms) t.canonicalize_factors();
        std::sort(terms.begin(), terms.end(),
                  [](const Term& x, const Term& y) { return x.key() < y.key(); });
        std::vector<Term> out;
        for (auto& t : terms) {
            if (!out.empty() && out.back().key() == t.key())
                out.back().coeff += t.coeff;
            else
                out.push_back(t);
        }
        double scale = 0.0;
        for (const auto& t : out) scale = std::max(scale, std::abs(t.coeff));
        std::vector<Term> kept;
        for (auto& t : out)
            if (std::abs(t.coeff) > tol * std::max(scale, 1.0)) kept.push_back(std::move(t));
        terms = std::move(kept);
    }
};

namespace detail {

// atom sort keys inside a class
inline bool class_sorted(const Atom& x, const Atom& y) {
    return std::tie(x.mom.var, x.mom.sign, x.label, x.kind) <=
           std::tie(y.mom.var, y.mom.sign, y.label, y.kind);
}

inline Momentum neg(Momentum m) { return m.negated(); }

// apply one rewrite at position i (atoms w[i], w[i+1]); returns the terms
inline std::vector<Term> rewrite_pair(const Term& t, std::size_t i) {
    const Atom& x = t.word[i];
    const Atom& y = t.word[i + 1];
    std::vector<Term> out;

    auto base_without_pair = [&](std::vector<Atom> replacement) {
        Term n = t;
        n.word.erase(n.word.begin() + static_cast<std::ptrdiff_t>(i),
                     n.word.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        n.word.insert(n.word.begin() + static_cast<std::ptrdiff_t>(i), replacement.begin(),
                      replacement.end());
        return n;
    };

    const int cx = order_class(x.kind), cy = order_class(y.kind);

    if (x.kind == AtomKind::annihilate && y.kind == AtomKind::create) {
        // a_x adag_y = S(x - y) adag_y a_x + 2 pi d(px - py)[delta_l 1 + eps_l t(x)]
        //              + 2 pi d(px + py) delta_l r(x)
        Term swapped = base_without_pair({y, x});
        swapped.scalars.push_back(ScalarFactor::s(x.signed_mom(), neg(y.signed_mom())));
        out.push_back(std::move(swapped));
        if (x.label == y.label) {
            Term contracted = base_without_pair({});
            contracted.coeff *= two_pi;
            contracted.deltas.push_back(DeltaFactor::make(x.mom, neg(y.mom)));
            out.push_back(std::move(contracted));
            Term reflected = base_without_pair({make_r(x.signed_mom())});
            reflected.coeff *= two_pi;
            reflected.deltas.push_back(DeltaFactor::make(x.mom, y.mom));
            out.push_back(std::move(reflected));
        } else {
            Term transmitted = base_without_pair({make_t(x.signed_mom())});
            transmitted.coeff *= two_pi;
            transmitted.deltas.push_back(DeltaFactor::make(x.mom, neg(y.mom)));
            out.push_back(std::move(transmitted));
        }
        return out;
    }

    if (x.kind == AtomKind::annihilate && cy == 1) {
        // a(p1) d(p2) = S(p2 - p1) S(p2 + p1) d(p2) a(p1), plain momenta
        Term n = base_without_pair({y, x});
        n.scalars.push_back(ScalarFactor::s(y.mom, neg(x.mom)));
        n.scalars.push_back(ScalarFactor::s(y.mom, x.mom));
        out.push_back(std::move(n));
        return out;
    }

    if (cx == 1 && y.kind == AtomKind::create) {
        // d(p1) adag(p2) = S(p1 - p2) S(p1 + p2) adag(p2) d(p1)
        Term n = base_without_pair({y, x});
        n.scalars.push_back(ScalarFactor::s(x.mom, neg(y.mom)));
        n.scalars.push_back(ScalarFactor::s(x.mom, y.mom));
        out.push_back(std::move(n));
        return out;
    }

    if (cx == cy && cx == 1) {  // defect generators commute
        Term n = base_without_pair({y, x});
        out.push_back(std::move(n));
        return out;
    }

    if (cx == cy && (x.kind == AtomKind::create || x.kind == AtomKind::annihilate)) {
        // bulk exchange: w1 w2 = S(y - x signed) w2 w1 for both aa and adag adag
        Term n = base_without_pair({y, x});
        n.scalars.push_back(ScalarFactor::s(y.signed_mom(), neg(x.signed_mom())));
        out.push_back(std::move(n));
        return out;
    }

    throw std::logic_error("rewrite_pair: no applicable rule");
}

inline bool find_violation(const Term& t, std::size_t& pos) {
    for (std::size_t i = 0; i + 1 < t.word.size(); ++i) {
        const Atom& x = t.word[i];
        const Atom& y = t.word[i + 1];
        const int cx = order_class(x.kind), cy = order_class(y.kind);
        if (cx > cy) {
            pos = i;
            return true;
        }
        if (cx == cy && !class_sorted(x, y)) {
            pos = i;
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline Expression normal_order(const Expression& e) {
    std::vector<Term> work = e.terms;
    Expression done;
    while (!work.empty()) {
        Term t = std::move(work.back());
        work.pop_back();
        std::size_t pos = 0;
        if (detail::find_violation(t, pos)) {
            for (auto& n : detail::rewrite_pair(t, pos)) work.push_back(std::move(n));
        } else {
            done.terms.push_back(std::move(t));
        }
    }
    done.combine();
    return done;
}

// Vacuum expectation: drop terms with surviving bulk generators, replace the
// remaining defect word by its multiplicative vacuum values.
inline Expression vacuum_expectation(const Expression& e) {
    Expression no = normal_order(e);
    Expression out;
    for (auto& t : no.terms) {
        bool bulk = false;
        Term n = t;
        n.word.clear();
        for (const Atom& a : t.word) {
            if (a.kind == AtomKind::annihilate || a.kind == AtomKind::create) {
                bulk = true;
                break;
            }
            n.scalars.push_back(a.kind == AtomKind::reflect ? ScalarFactor::r(a.mom)
                                                            : ScalarFactor::t(a.mom));
        }
        if (!bulk) out.terms.push_back(std::move(n));
    }
    out.combine();
    return out;
}

// ---- printing / serialization ------------------------------------------

inline std::string to_string(Momentum m) {
    std::string s = m.sign < 0 ? "-" : "";
    s += "k" + std::to_string(m.var);
    return s;
}

inline std::string to_string(const Atom& a) {
    const char* name = nullptr;
    switch (a.kind) {
        case AtomKind::create: name = "adag"; break;
        case AtomKind::annihilate: name = "a"; break;
        case AtomKind::reflect: name = "r"; break;
        case AtomKind::transmit: name = "t"; break;
    }
    std::string s(name);
    s += "(";
    if (a.label != 0) {
        s += a.label > 0 ? "+," : "-,";
    }
    s += to_string(a.mom) + ")";
    return s;
}

inline std::string to_string(const ScalarFactor& f) {
    switch (f.kind) {
        case ScalarFactor::S: {
            std::string rhs = to_string(f.b);
            if (rhs[0] != '-') rhs = "+" + rhs;
            return "S(" + to_string(f.a) + rhs + ")";
        }
        case ScalarFactor::T: return "T(" + to_string(f.a) + ")";
        case ScalarFactor::R: return "R(" + to_string(f.a) + ")";
    }
    return "?";
}

inline std::string to_string(const DeltaFactor& d) {
    std::string rhs = to_string(d.b);
    if (rhs[0] != '-') rhs = "+" + rhs;
    return "2pi.delta(" + to_string(d.a) + rhs + ")";
}

inline std::string to_string(const Term& t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", t.coeff.real(), t.coeff.imag());
    std::string s(buf);
    for (const auto& d : t.deltas) s += " " + to_string(d);
    for (const auto& f : t.scalars) s += " " + to_string(f);
    s += " [";
    for (std::size_t i = 0; i < t.word.size(); ++i) {
        if (i) s += " ";
        s += to_string(t.word[i]);
    }
    s += "]";
    return s;
}

inline std::string to_string(const Expression& e) {
    std::string s;
    for (const auto& t : e.terms) s += to_string(t) + "\n";
    return s;
}

// structural equality of canonicalized expressions with coefficient tolerance
inline bool expressions_match(Expression a, Expression b, double tol = 1e-12) {
    a.combine();
    b.combine();
    if (a.terms.size() != b.terms.size()) return false;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (a.terms[i].key() != b.terms[i].key()) return false;
        if (std::abs(a.terms[i].coeff - b.terms[i].coeff) >
            tol * std::max(1.0, std::abs(b.terms[i].coeff)))
            return false;
    }
    return true;
}

}  // namespace nlsdefect::rt
