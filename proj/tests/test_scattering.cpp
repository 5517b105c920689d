#include <doctest.h>

#include <random>

#include "nlsdefect/scattering.hpp"

using namespace nlsdefect;
using namespace nlsdefect::scattering;

namespace {
Packet make_packet(HalfLine label, PacketRole role, double lo, double hi,
                   std::mt19937_64& rng) {
    Packet p;
    p.label = label;
    p.role = role;
    const int side = role == PacketRole::out_like ? sign(label) : -sign(label);
    p.profile = side > 0 ? random_profile(rng, lo, hi) : random_profile(rng, -hi, -lo);
    return p;
}
}  // namespace

TEST_CASE("packet validation") {
    std::mt19937_64 rng(3);
    Packet ok = make_packet(HalfLine::plus, PacketRole::out_like, 1.0, 2.0, rng);
    CHECK_NOTHROW(ok.validate());
    Packet bad = ok;
    bad.role = PacketRole::in_like;  // support now on the wrong side
    CHECK_THROWS(bad.validate());
    // ordering violations are rejected
    Packet outer = make_packet(HalfLine::plus, PacketRole::out_like, 3.0, 4.5, rng);
    CHECK_THROWS(OrderedFamily({ok, outer}));
    CHECK_NOTHROW(OrderedFamily({outer, ok}));
}

TEST_CASE("free evolution is exact and unitary") {
    std::mt19937_64 rng(5);
    Packet p = make_packet(HalfLine::plus, PacketRole::out_like, 1.0, 2.2, rng);
    const auto f0 = evolve_packet(p, 0.0);
    // t = 0: plain inverse transform; compare against direct quadrature
    MomentumGrid grid(8.0, 513);
    for (double x : {-3.0, 0.4, 2.0, 7.5}) {
        const cplx want = grid.trapezoid([&](double q) {
            return p.profile(q) * std::exp(iu * q * x);
        }) / two_pi;
        CHECK(std::abs(f0(x) - want) < 1e-12);
    }
    const double n0 = packet_position_norm(f0);
    for (double t : {0.5, 2.0, 11.0}) {
        CHECK(std::abs(packet_position_norm(evolve_packet(p, t)) - n0) < 1e-12 * n0);
    }
}

TEST_CASE("group velocity of a narrow packet") {
    // packet centered at p0 = 1.5 drifts at speed ~ 2 p0
    Packet p;
    p.label = HalfLine::plus;
    p.role = PacketRole::out_like;
    p.profile = AnalyticProfile::bump(1.0, 1.5, 0.18, 0);
    const double t = 2.0;
    const auto ft = evolve_packet(p, t);
    double best = 0.0, bestx = 0.0;
    for (double x = 0.0; x < 12.0; x += 0.01) {
        const double v = std::abs(ft(x));
        if (v > best) {
            best = v;
            bestx = x;
        }
    }
    CHECK(std::abs(bestx - 2.0 * 1.5 * t) < 0.05 * 2.0 * 1.5 * t);
}

TEST_CASE("asymptotic residual decays along a geometric ladder") {
    std::mt19937_64 rng(7);
    Packet p = make_packet(HalfLine::plus, PacketRole::out_like, 1.0, 2.0, rng);
    double prev = asymptotic_residual(p, 1.0);
    for (double t : {2.0, 4.0, 8.0, 16.0}) {
        const double r = asymptotic_residual(p, t);
        CHECK(r < prev);
        prev = r;
    }
    CHECK(asymptotic_residual(p, 20.0) < 1e-6);

    // mirror packet gives identical residuals
    Packet m;
    m.label = HalfLine::minus;
    m.role = PacketRole::out_like;
    m.profile = p.profile.reflected();
    CHECK(std::abs(asymptotic_residual(m, 6.0) - asymptotic_residual(p, 6.0)) < 1e-12);
}

TEST_CASE("scattering map flips supports and is involution-like") {
    std::mt19937_64 rng(9);
    Packet p1 = make_packet(HalfLine::plus, PacketRole::out_like, 3.0, 4.2, rng);
    Packet p2 = make_packet(HalfLine::minus, PacketRole::out_like, 1.0, 2.2, rng);
    OrderedFamily out({p1, p2});
    OrderedFamily in = s_map(out);
    CHECK(in.packets.front().role == PacketRole::in_like);
    CHECK(in.packets[0].label == p2.label);
    CHECK(in.packets[0].profile.support_lo() == doctest::Approx(-p2.profile.support_hi()));
    // double flip restores the original profiles in reversed-reversed order
    for (double q : {1.2, 1.9}) {
        CHECK(std::abs(in.packets[1].profile(-q) - p1.profile(q)) < 1e-14);
    }
}

TEST_CASE("amplitudes vanish unless particle numbers match") {
    std::mt19937_64 rng(11);
    ModelParams mp{0.5, 1.0};
    MomentumGrid grid(8.0, 129);
    Packet h1 = make_packet(HalfLine::plus, PacketRole::out_like, 3.0, 4.2, rng);
    Packet h2 = make_packet(HalfLine::plus, PacketRole::out_like, 1.0, 2.2, rng);
    Packet g1 = make_packet(HalfLine::plus, PacketRole::in_like, 1.0, 2.0, rng);
    OrderedFamily out2({h1, h2});
    OrderedFamily in1({g1});
    CHECK(transition_amplitude(out2, in1, mp, grid) == cplx(0.0));
}

TEST_CASE("one-particle closed forms match the pipeline") {
    std::mt19937_64 rng(13);
    MomentumGrid grid(8.0, 257);
    for (double eta : {0.5, 1.0}) {
        ModelParams mp{0.5, eta};
        // same side: reflection
        Packet h = make_packet(HalfLine::plus, PacketRole::out_like, 1.2, 2.4, rng);
        Packet g;
        g.label = HalfLine::plus;
        g.role = PacketRole::in_like;
        g.profile = random_profile(rng, -2.6, -1.0);
        const cplx closed = one_particle_amplitude(h, g, mp, grid);
        const cplx general =
            transition_amplitude(OrderedFamily({h}), OrderedFamily({g}), mp, grid);
        CHECK(std::abs(closed - general) < 1e-9 * std::max(1.0, std::abs(general)));

        // opposite side: transmission
        Packet gm;
        gm.label = HalfLine::minus;
        gm.role = PacketRole::in_like;
        gm.profile = random_profile(rng, 1.1, 2.3);
        const cplx closed_t = one_particle_amplitude(h, gm, mp, grid);
        const cplx general_t =
            transition_amplitude(OrderedFamily({h}), OrderedFamily({gm}), mp, grid);
        CHECK(std::abs(closed_t - general_t) < 1e-9 * std::max(1.0, std::abs(general_t)));
    }
    // eta = 0: same-side amplitude vanishes (no reflection)
    ModelParams free_mp{0.5, 0.0};
    Packet h = make_packet(HalfLine::plus, PacketRole::out_like, 1.2, 2.4, rng);
    Packet g;
    g.label = HalfLine::plus;
    g.role = PacketRole::in_like;
    g.profile = random_profile(rng, -2.6, -1.0);
    CHECK(std::abs(one_particle_amplitude(h, g, free_mp, grid)) < 1e-14);
}

TEST_CASE("two-particle closed forms match the pipeline") {
    std::mt19937_64 rng(17);
    MomentumGrid grid(8.0, 257);
    ModelParams mp{0.5, 1.0};
    Packet h1 = make_packet(HalfLine::plus, PacketRole::out_like, 3.2, 4.6, rng);
    Packet h2 = make_packet(HalfLine::plus, PacketRole::out_like, 1.0, 2.4, rng);
    SUBCASE("both incoming on the same side") {
        Packet g1, g2;
        g1.label = HalfLine::plus;
        g1.role = PacketRole::in_like;
        g1.profile = random_profile(rng, -2.2, -1.0);
        g2.label = HalfLine::plus;
        g2.role = PacketRole::in_like;
        g2.profile = random_profile(rng, -4.8, -2.6);
        OrderedFamily out({h1, h2}), in({g1, g2});
        const cplx closed = two_particle_amplitude(out, in, mp, grid);
        const cplx general = transition_amplitude(out, in, mp, grid);
        CHECK(std::abs(closed - general) < 1e-9 * std::max(1.0, std::abs(general)));
    }
    SUBCASE("second incoming transmitted") {
        Packet g1, g2;
        g1.label = HalfLine::plus;
        g1.role = PacketRole::in_like;
        g1.profile = random_profile(rng, -2.2, -1.0);
        g2.label = HalfLine::minus;
        g2.role = PacketRole::in_like;
        g2.profile = random_profile(rng, 2.6, 4.8);
        OrderedFamily out({h1, h2}), in({g1, g2});
        const cplx closed = two_particle_amplitude(out, in, mp, grid);
        const cplx general = transition_amplitude(out, in, mp, grid);
        CHECK(std::abs(closed - general) < 1e-9 * std::max(1.0, std::abs(general)));
    }
}

TEST_CASE("scattering operator preserves inner products") {
    std::mt19937_64 rng(19);
    MomentumGrid grid(8.0, 257);
    ModelParams mp{0.5, 1.0};
    for (int trial = 0; trial < 3; ++trial) {
        Packet a1 = make_packet(HalfLine::plus, PacketRole::out_like, 3.0, 4.4, rng);
        Packet a2 = make_packet(trial % 2 ? HalfLine::minus : HalfLine::plus,
                                PacketRole::out_like, 1.0, 2.4, rng);
        Packet b1 = make_packet(HalfLine::plus, PacketRole::out_like, 3.1, 4.5, rng);
        Packet b2 = make_packet(trial % 2 ? HalfLine::minus : HalfLine::plus,
                                PacketRole::out_like, 1.1, 2.5, rng);
        OrderedFamily fa({a1, a2}), fb({b1, b2});
        const cplx lhs = family_overlap(fa.packets, fb.packets, mp, grid);
        OrderedFamily sa = s_map(fa), sb = s_map(fb);
        const cplx rhs = family_overlap(sa.packets, sb.packets, mp, grid);
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("unitarity budget of the one-particle amplitudes") {
    // with g built from h by mirroring/transmitting, |R|^2 + |T|^2 = 1 shows
    // up as the completeness of the two exit channels
    MomentumGrid grid(8.0, 257);
    ModelParams mp{0.5, 1.0};
    auto base = AnalyticProfile::bump(1.0, 1.6, 0.22, 0);
    Packet h;
    h.label = HalfLine::plus;
    h.role = PacketRole::out_like;
    h.profile = base;
    Packet g_ref;  // reflected partner: g(+p) sits on R^-
    g_ref.label = HalfLine::plus;
    g_ref.role = PacketRole::in_like;
    g_ref.profile = base.reflected();
    Packet g_tr;  // transmitted partner on the other side
    g_tr.label = HalfLine::minus;
    g_tr.role = PacketRole::in_like;
    g_tr.profile = base;
    const cplx ar = one_particle_amplitude(h, g_ref, mp, grid);
    const cplx at = one_particle_amplitude(h, g_tr, mp, grid);
    // both amplitudes equal int |h|^2 R or T over the support; compare the
    // sum against the norm budget
    cplx rpart = 0.0, tpart = 0.0, nrm = 0.0;
    const int n = 4001;
    const double lo = 0.5, hi = 3.0, step = (hi - lo) / (n - 1);
    for (int j = 0; j < n; ++j) {
        const double p = lo + j * step;
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        const double dens = std::norm(base(p));
        rpart += w * step * dens * std::norm(defect_R(p, mp));
        tpart += w * step * dens * std::norm(defect_T(p, mp));
        nrm += w * step * dens;
    }
    CHECK(std::abs((rpart + tpart - nrm) / nrm) < 1e-12);
    (void)ar;
    (void)at;
}
