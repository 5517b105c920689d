#include <doctest.h>

#include <random>

#include "nlsdefect/profiles.hpp"
#include "nlsdefect/rt_evaluate.hpp"

using namespace nlsdefect;
using namespace nlsdefect::rt;

namespace {
Momentum k(int var, int sign = +1) { return {var, sign}; }

// the fundamental exchange relation projected on concrete labels
Expression aadag_word(int la, int lb) {
    return Expression::word({make_a(la, k(1)), make_adag(lb, k(2))});
}
}  // namespace

TEST_CASE("a adag exchange reproduces the bulk relation") {
    // same labels: S adag a + 2pi d(p-q) 1 + 2pi d(p+q) r(alpha p)
    Expression no = normal_order(aadag_word(+1, +1));
    REQUIRE(no.terms.size() == 3);
    Expression want;
    {
        Term t1;  // S(k1 - k2) adag a
        t1.word = {make_adag(+1, k(2)), make_a(+1, k(1))};
        t1.scalars = {ScalarFactor::s(k(1), k(2, -1))};
        want.terms.push_back(t1);
        Term t2;  // 2pi d(k1 - k2)
        t2.coeff = two_pi;
        t2.deltas = {DeltaFactor::make(k(1), k(2, -1))};
        want.terms.push_back(t2);
        Term t3;  // 2pi d(k1 + k2) r(k1)
        t3.coeff = two_pi;
        t3.word = {make_r(k(1))};
        t3.deltas = {DeltaFactor::make(k(1), k(2))};
        want.terms.push_back(t3);
    }
    CHECK(expressions_match(no, want));

    // opposite labels: S adag a + 2pi d(p-q) t(alpha p)
    Expression no2 = normal_order(aadag_word(+1, -1));
    REQUIRE(no2.terms.size() == 2);
    Expression want2;
    {
        Term t1;
        t1.word = {make_adag(-1, k(2)), make_a(+1, k(1))};
        t1.scalars = {ScalarFactor::s(k(1), k(2))};  // S(k1 - (-k2)) = S(k1 + k2)
        want2.terms.push_back(t1);
        Term t2;
        t2.coeff = two_pi;
        t2.word = {make_t(k(1))};
        t2.deltas = {DeltaFactor::make(k(1), k(2, -1))};
        want2.terms.push_back(t2);
    }
    CHECK(expressions_match(no2, want2));
}

TEST_CASE("adag adag reordering is an involution through S unitarity") {
    Expression w = Expression::word({make_adag(+1, k(2)), make_adag(-1, k(1))});
    Expression no = normal_order(w);
    REQUIRE(no.terms.size() == 1);
    CHECK(no.terms[0].scalars.size() == 1);
    // applying normal order again leaves the canonical form unchanged
    CHECK(expressions_match(no, normal_order(no)));
    // numerically S(x) S(-x) = 1: reorder the reordered word manually
    ModelParams mp{0.7, 1.0};
    MomentumGrid grid(8.0, 129);
    Bindings b;
    b[1] = {Binding::fixed, 0.83, {}};
    b[2] = {Binding::fixed, -1.21, {}};
    // value check via a full vev against a adag on both sides
    Expression lhs = Expression::word(
        {make_a(-1, k(1)), make_a(+1, k(2)), make_adag(+1, k(2)), make_adag(-1, k(1))});
    (void)lhs;
}

TEST_CASE("mixed exchange pushes annihilators through defect generators") {
    Expression w = Expression::word({make_a(+1, k(1)), make_r(k(2))});
    Expression no = normal_order(w);
    REQUIRE(no.terms.size() == 1);
    const Term& t = no.terms[0];
    REQUIRE(t.word.size() == 2);
    CHECK(t.word[0].kind == AtomKind::reflect);
    CHECK(t.word[1].kind == AtomKind::annihilate);
    // S(k2 - k1) S(k2 + k1)
    Expression want;
    Term wt;
    wt.word = {make_r(k(2)), make_a(+1, k(1))};
    wt.scalars = {ScalarFactor::s(k(2), k(1, -1)), ScalarFactor::s(k(2), k(1))};
    want.terms.push_back(wt);
    CHECK(expressions_match(no, want));
}

TEST_CASE("normal order is idempotent on random words") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> kind(0, 3), label(0, 1), sgn(0, 1);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Atom> atoms;
        const int len = 2 + static_cast<int>(rng() % 4);
        for (int j = 0; j < len; ++j) {
            const Momentum m{j + 1, sgn(rng) ? +1 : -1};
            switch (kind(rng)) {
                case 0: atoms.push_back(make_a(label(rng) ? +1 : -1, m)); break;
                case 1: atoms.push_back(make_adag(label(rng) ? +1 : -1, m)); break;
                case 2: atoms.push_back(make_r(m)); break;
                default: atoms.push_back(make_t(m)); break;
            }
        }
        Expression no = normal_order(Expression::word(atoms));
        CHECK(expressions_match(no, normal_order(no)));
    }
}

TEST_CASE("grading: unmatched words have vanishing vacuum expectation") {
    Expression w1 = Expression::word({make_adag(+1, k(1))});
    CHECK(vacuum_expectation(w1).terms.empty());
    Expression w2 = Expression::word({make_a(+1, k(1)), make_a(-1, k(2)), make_adag(+1, k(3))});
    CHECK(vacuum_expectation(w2).terms.empty());
    Expression w3 =
        Expression::word({make_a(+1, k(1)), make_adag(+1, k(2)), make_adag(-1, k(3))});
    CHECK(vacuum_expectation(w3).terms.empty());
}

TEST_CASE("defect unitarity as expressions") {
    // t(p) t(-p) + r(p) r(-p) - 1 has vanishing vacuum value
    Expression e;
    {
        Term a;
        a.word = {make_t(k(1)), make_t(k(1, -1))};
        e.terms.push_back(a);
        Term b;
        b.word = {make_r(k(1)), make_r(k(1, -1))};
        e.terms.push_back(b);
        Term c;
        c.coeff = -1.0;
        e.terms.push_back(c);
    }
    Expression v = vacuum_expectation(e);
    ModelParams mp{0.4, 1.3};
    MomentumGrid grid(8.0, 129);
    for (double p : {-2.0, -0.3, 0.7, 1.9}) {
        Bindings bind;
        bind[1] = {Binding::fixed, p, {}};
        CHECK(std::abs(evaluate_smeared(v, bind, mp, grid)) < 1e-14);
    }
}

TEST_CASE("one-particle correlator structure") {
    ModelParams mp{0.5, 1.0};
    MomentumGrid grid(8.0, 257);
    std::mt19937_64 rng(7);
    // same half-line, same-side supports, no mirror overlap: norm term only
    auto f = random_profile(rng, 1.0, 2.0);
    Expression v = vacuum_expectation(aadag_word(+1, +1));
    Bindings bind;
    bind[1] = {Binding::integrate, 0.0, [&](double p) { return std::conj(f(p)); }};
    bind[2] = {Binding::integrate, 0.0, [&](double p) { return f(p); }};
    const cplx got = evaluate_smeared(v, bind, mp, grid);
    const cplx want = grid.trapezoid([&](double p) { return std::norm(f(p)); }) / two_pi;
    CHECK(std::abs(got - want) < 1e-12);

    // mirror pair picks up the reflection amplitude
    auto gmir = f.reflected();
    Bindings bind2;
    bind2[1] = {Binding::integrate, 0.0, [&](double p) { return std::conj(f(p)); }};
    bind2[2] = {Binding::integrate, 0.0, [&](double p) { return gmir(p); }};
    const cplx got2 = evaluate_smeared(v, bind2, mp, grid);
    const cplx want2 = grid.trapezoid([&](double p) {
        return std::conj(f(p)) * defect_R(p, mp) * f(p);
    }) / two_pi;
    CHECK(std::abs(got2 - want2) < 1e-12);
}

namespace {
// transcription of the displayed two-particle correlator for concrete labels
Expression golden_two_particle(int a1, int a2, int b1, int b2) {
    const Momentum p1 = k(1), p2 = k(2), q1 = k(3), q2 = k(4);
    Expression e;
    auto dl = [](int x, int y) { return x == y ? 1.0 : 0.0; };
    auto ep = [](int x, int y) { return x != y ? 1.0 : 0.0; };
    auto sm = [](Momentum m, int lab) { return Momentum{m.var, lab * m.sign}; };
    auto add = [&](cplx coeff, std::vector<ScalarFactor> sc, std::vector<DeltaFactor> dd,
                   std::vector<Atom> wrd = {}) {
        if (std::abs(coeff) == 0.0) return;
        Term t;
        t.coeff = coeff * two_pi * two_pi;
        t.scalars = std::move(sc);
        t.deltas = std::move(dd);
        t.word = std::move(wrd);
        e.terms.push_back(std::move(t));
    };
    const ScalarFactor S11 = ScalarFactor::s(sm(p1, a1), sm(q1, -b1));
    const ScalarFactor Sm = ScalarFactor::s(sm(p1, a1), sm(q2, -b2));
    const ScalarFactor Sp = ScalarFactor::s(sm(p1, a1), sm(q2, b2));
    const DeltaFactor d_p2q1 = DeltaFactor::make(p2, q1.negated());
    const DeltaFactor d_p2q1p = DeltaFactor::make(p2, q1);
    const DeltaFactor d_p1q2 = DeltaFactor::make(p1, q2.negated());
    const DeltaFactor d_p1q2p = DeltaFactor::make(p1, q2);
    const DeltaFactor d_p1q1 = DeltaFactor::make(p1, q1.negated());
    const DeltaFactor d_p1q1p = DeltaFactor::make(p1, q1);
    const DeltaFactor d_p2q2 = DeltaFactor::make(p2, q2.negated());
    const DeltaFactor d_p2q2p = DeltaFactor::make(p2, q2);

    // first four terms: crossed pairing, overall S(a1 p1 - b1 q1)
    // [dl(a2,b1) 1 + ep(a2,b1) T(a2 p2)] [dl(a1,b2) 1 + ep(a1,b2) T(a1 p1)] d(p2-q1) d(p1-q2)
    add(dl(a2, b1) * dl(a1, b2), {S11}, {d_p2q1, d_p1q2});
    add(dl(a2, b1) * ep(a1, b2), {S11, ScalarFactor::t(sm(p1, a1))}, {d_p2q1, d_p1q2});
    add(ep(a2, b1) * dl(a1, b2), {S11, ScalarFactor::t(sm(p2, a2))}, {d_p2q1, d_p1q2});
    add(ep(a2, b1) * ep(a1, b2), {S11, ScalarFactor::t(sm(p2, a2)), ScalarFactor::t(sm(p1, a1))},
        {d_p2q1, d_p1q2});
    // [dl(a2,b1) R(a2 p2)] [dl(a1,b2) 1 + ep T(a1 p1)] d(p2+q1) d(p1-q2)
    add(dl(a2, b1) * dl(a1, b2), {S11, ScalarFactor::r(sm(p2, a2))}, {d_p2q1p, d_p1q2});
    add(dl(a2, b1) * ep(a1, b2), {S11, ScalarFactor::r(sm(p2, a2)), ScalarFactor::t(sm(p1, a1))},
        {d_p2q1p, d_p1q2});
    // [dl 1 + ep T(a2p2)] [dl(a1,b2) R(a1 p1)] d(p2-q1) d(p1+q2)
    add(dl(a2, b1) * dl(a1, b2), {S11, ScalarFactor::r(sm(p1, a1))}, {d_p2q1, d_p1q2p});
    add(ep(a2, b1) * dl(a1, b2), {S11, ScalarFactor::t(sm(p2, a2)), ScalarFactor::r(sm(p1, a1))},
        {d_p2q1, d_p1q2p});
    // [dl R(a2p2)][dl R(a1p1)] d(p2+q1) d(p1+q2)
    add(dl(a2, b1) * dl(a1, b2), {S11, ScalarFactor::r(sm(p2, a2)), ScalarFactor::r(sm(p1, a1))},
        {d_p2q1p, d_p1q2p});

    // last four terms: direct pairing, extra S(a1 p1 -/+ b2 q2) on t/r parts
    // [dl(a1,b1) 1 + S S eps(a1,b1) T(a1p1)] [dl(a2,b2) 1 + ep T(a2p2)] d(p1-q1) d(p2-q2)
    add(dl(a1, b1) * dl(a2, b2), {}, {d_p1q1, d_p2q2});
    add(dl(a1, b1) * ep(a2, b2), {ScalarFactor::t(sm(p2, a2))}, {d_p1q1, d_p2q2});
    add(ep(a1, b1) * dl(a2, b2), {Sm, Sp, ScalarFactor::t(sm(p1, a1))}, {d_p1q1, d_p2q2});
    add(ep(a1, b1) * ep(a2, b2), {Sm, Sp, ScalarFactor::t(sm(p1, a1)), ScalarFactor::t(sm(p2, a2))},
        {d_p1q1, d_p2q2});
    // S S [dl(a1,b1) R(a1p1)][dl(a2,b2) 1 + ep T(a2p2)] d(p1+q1) d(p2-q2)
    add(dl(a1, b1) * dl(a2, b2), {Sm, Sp, ScalarFactor::r(sm(p1, a1))}, {d_p1q1p, d_p2q2});
    add(dl(a1, b1) * ep(a2, b2), {Sm, Sp, ScalarFactor::r(sm(p1, a1)), ScalarFactor::t(sm(p2, a2))},
        {d_p1q1p, d_p2q2});
    // [dl 1 + S S ep T(a1p1)][dl(a2,b2) R(a2p2)] d(p1-q1) d(p2+q2)
    add(dl(a1, b1) * dl(a2, b2), {ScalarFactor::r(sm(p2, a2))}, {d_p1q1, d_p2q2p});
    add(ep(a1, b1) * dl(a2, b2), {Sm, Sp, ScalarFactor::t(sm(p1, a1)), ScalarFactor::r(sm(p2, a2))},
        {d_p1q1, d_p2q2p});
    // S S [dl R(a1p1)][dl R(a2p2)] d(p1+q1) d(p2+q2)
    add(dl(a1, b1) * dl(a2, b2), {Sm, Sp, ScalarFactor::r(sm(p1, a1)), ScalarFactor::r(sm(p2, a2))},
        {d_p1q1p, d_p2q2p});
    e.combine();
    return e;
}
}  // namespace

TEST_CASE("two-particle vacuum correlator matches the eight-term display") {
    for (int a1 : {+1, -1})
        for (int a2 : {+1, -1})
            for (int b1 : {+1, -1})
                for (int b2 : {+1, -1}) {
                    Expression w = Expression::word({make_a(a2, k(2)), make_a(a1, k(1)),
                                                     make_adag(b1, k(3)), make_adag(b2, k(4))});
                    Expression got = vacuum_expectation(w);
                    Expression want = golden_two_particle(a1, a2, b1, b2);
                    const bool ok = expressions_match(got, want);
                    CHECK(ok);
                    if (!ok) {
                        MESSAGE("labels ", a1, a2, b1, b2);
                        MESSAGE("got:\n", to_string(got));
                        MESSAGE("want:\n", to_string(want));
                    }
                }
}

TEST_CASE("two-point sectors match the displayed integrands") {
    ModelParams mp{0.3, 1.0};
    MomentumGrid grid(10.0, 513);
    const double sigma = 0.4;
    const double t1 = 0.3, t2 = 0.1;
    const double t12 = t1 - t2;
    auto direct = [&](std::function<cplx(double)> sector) {
        return grid.trapezoid([&](double p) {
                   return std::exp(-iu * p * p * t12 - sigma * p * p) * sector(p);
               }) / two_pi;
    };
    SUBCASE("both positive") {
        const double x1 = 0.8, x2 = 0.5;
        const auto r = rt::two_point(t1, x1, t2, x2, mp, sigma, grid);
        const cplx want = direct([&](double p) {
            return std::exp(iu * p * (x1 - x2)) +
                   defect_R(p, mp) * std::exp(iu * p * (x1 + x2));
        });
        CHECK(std::abs(r.value - want) < 1e-12);
    }
    SUBCASE("transmission sector") {
        const double x1 = 0.8, x2 = -0.5;
        const auto r = rt::two_point(t1, x1, t2, x2, mp, sigma, grid);
        const cplx want = direct([&](double p) {
            return defect_T(p, mp) * std::exp(iu * p * (x1 - x2));
        });
        CHECK(std::abs(r.value - want) < 1e-12);
    }
    SUBCASE("conjugate sectors") {
        const double x1 = 0.8, x2 = 0.5;
        const auto rpp = rt::two_point(t1, x1, t2, x2, mp, sigma, grid);
        const auto rmm = rt::two_point(t1, -x1, t2, -x2, mp, sigma, grid);
        const cplx want_mm = direct([&](double p) {
            return std::exp(iu * p * (-x1 + x2)) +
                   std::conj(defect_R(p, mp)) * std::exp(-iu * p * (x1 + x2));
        });
        CHECK(std::abs(rmm.value - want_mm) < 1e-12);
        (void)rpp;
    }
    SUBCASE("free defect reduces to the free propagator") {
        ModelParams free_mp{0.3, 0.0};
        const auto r = rt::two_point(t1, 0.8, t2, -0.5, free_mp, sigma, grid);
        const cplx want = direct([&](double p) { return std::exp(iu * p * 1.3); });
        CHECK(std::abs(r.value - want) < 1e-12);
    }
    SUBCASE("invalid regulator is rejected") {
        CHECK_THROWS(rt::two_point(0.0, 1.0, 0.0, 1.0, mp, 0.0, grid));
    }
}

TEST_CASE("rewriting preserves smeared values across strategies") {
    // associativity-style check: normal ordering a pre-reordered word gives
    // the same canonical form and the same smeared value
    ModelParams mp{0.6, 0.8};
    MomentumGrid grid(8.0, 257);
    std::mt19937_64 rng(19);
    auto f1 = random_profile(rng, 0.5, 2.5);
    auto f2 = random_profile(rng, -2.5, -0.5);
    auto f3 = random_profile(rng, 0.8, 2.8);
    auto f4 = random_profile(rng, -2.8, -0.8);

    Expression w = Expression::word(
        {make_a(+1, k(1)), make_a(-1, k(2)), make_adag(-1, k(3)), make_adag(+1, k(4))});
    // pre-exchange the middle annihilator pair by hand: a+ a- = S(...) a- a+
    Expression w2;
    {
        Term t;
        t.word = {make_a(-1, k(2)), make_a(+1, k(1)), make_adag(-1, k(3)), make_adag(+1, k(4))};
        t.scalars = {ScalarFactor::s(Momentum{1, +1}, Momentum{2, +1})};
        // a_{+}(k1) a_{-}(k2) = S(-k2 - k1) a_{-}(k2) a_{+}(k1); S arg = (-k2) - (+k1)
        t.scalars = {ScalarFactor::s(Momentum{2, -1}, Momentum{1, -1})};
        w2.terms.push_back(t);
    }
    Expression n1 = vacuum_expectation(w);
    Expression n2 = vacuum_expectation(w2);
    Bindings bind;
    bind[1] = {Binding::integrate, 0.0, [&](double p) { return std::conj(f1(p)); }};
    bind[2] = {Binding::integrate, 0.0, [&](double p) { return std::conj(f2(p)); }};
    bind[3] = {Binding::integrate, 0.0, [&](double p) { return f3(p); }};
    bind[4] = {Binding::integrate, 0.0, [&](double p) { return f4(p); }};
    const cplx v1 = evaluate_smeared(n1, bind, mp, grid);
    const cplx v2 = evaluate_smeared(n2, bind, mp, grid);
    CHECK(std::abs(v1 - v2) < 1e-10 * std::max(1.0, std::abs(v1)));
}

TEST_CASE("unresolvable deltas raise hard errors") {
    Term t;
    t.coeff = 1.0;
    t.deltas = {DeltaFactor::make(k(1), k(2, -1))};
    ModelParams mp{0.5, 1.0};
    MomentumGrid grid(8.0, 65);
    Bindings bind;
    bind[1] = {Binding::fixed, 1.0, {}};
    bind[2] = {Binding::fixed, 2.0, {}};
    CHECK_THROWS_AS(evaluate_term(t, bind, mp, grid), std::invalid_argument);
}
