#pragma once

#include <optional>
#include <vector>

#include "nlsdefect/profiles.hpp"
#include "nlsdefect/quadrature.hpp"
#include "nlsdefect/rt_evaluate.hpp"

// Wavepacket asymptotics and the factorized scattering amplitudes: free
// evolution of momentum packets in closed form, the wrong-half-line residual
// entering the strong asymptotic limits, the scattering map (order reversal
// plus momentum reflection), and transition amplitudes evaluated through the
// exchange algebra with closed forms for one and two particles.

namespace nlsdefect::scattering {

using nlsdefect::rt::Binding;
using nlsdefect::rt::Bindings;

enum class PacketRole { out_like, in_like };

struct Packet {
    HalfLine label = HalfLine::plus;
    AnalyticProfile profile;  // momentum space
    PacketRole role = PacketRole::out_like;

    // support side: out-like packets live on R^alpha, in-like on R^{-alpha}
    void validate() const {
        const double lo = profile.support_lo(), hi = profile.support_hi();
        if (!(lo < hi)) throw std::invalid_argument("Packet: empty support");
        if (lo <= 0.0 && hi >= 0.0)
            throw std::invalid_argument("Packet: support must exclude the origin");
        const int side = hi < 0.0 ? -1 : +1;
        const int want = role == PacketRole::out_like ? sign(label) : -sign(label);
        if (side != want)
            throw std::invalid_argument("Packet: support lies on the wrong half-line for its role");
        if (profile.max_tail() > 1e-12)
            throw std::invalid_argument("Packet: declared support has heavy tails");
    }

    double abs_lo() const {
        return std::min(std::abs(profile.support_lo()), std::abs(profile.support_hi()));
    }
    double abs_hi() const {
        return std::max(std::abs(profile.support_lo()), std::abs(profile.support_hi()));
    }
};

// Ordered family per the in/out prescriptions: for out-like families the
// first entry has the outermost momentum support; in-like families are
// ordered the other way around.
struct OrderedFamily {
    std::vector<Packet> packets;

    explicit OrderedFamily(std::vector<Packet> ps) : packets(std::move(ps)) {
        if (packets.empty()) throw std::invalid_argument("OrderedFamily: empty");
        const PacketRole role = packets.front().role;
        for (const auto& p : packets) {
            p.validate();
            if (p.role != role) throw std::invalid_argument("OrderedFamily: mixed roles");
        }
        for (std::size_t i = 0; i + 1 < packets.size(); ++i) {
            const Packet& a = packets[i];
            const Packet& b = packets[i + 1];
            const bool ok = role == PacketRole::out_like ? (a.abs_lo() > b.abs_hi())
                                                         : (b.abs_lo() > a.abs_hi());
            if (!ok) throw std::invalid_argument("OrderedFamily: support ordering violated");
        }
    }

    int size() const { return static_cast<int>(packets.size()); }
};

// f^t(x) = int dp/2pi f(p) e^{ipx - ip^2 t}, exact for the analytic family.
inline AnalyticProfile evolve_packet(const Packet& p, double t) {
    return p.profile.times_exp(-iu * t, 0.0).fourier().reflected().scaled(1.0 / two_pi);
}

inline double packet_position_norm(const AnalyticProfile& ft) {
    return std::sqrt(std::max(0.0, profile_inner(ft, ft).real()));
}

// || theta(alpha x) f^t - f^t || = L2 mass on the wrong half-line.
inline double asymptotic_residual(const Packet& p, double t) {
    const AnalyticProfile ft = evolve_packet(p, t);
    const int a = sign(p.label);
    // integration window from the evolved profile's own extent
    const double lo = ft.support_lo(), hi = ft.support_hi();
    const double reach = std::max(std::abs(lo), std::abs(hi)) + 10.0;
    auto f2 = [&](double x) { return cplx(std::norm(ft(x)), 0.0); };
    const cplx mass = a > 0 ? adaptive_simpson(f2, -reach, 0.0, 1e-16)
                            : adaptive_simpson(f2, 0.0, reach, 1e-16);
    return std::sqrt(std::max(0.0, mass.real()));
}

// S: reverse the creator order and flip every momentum profile.
inline OrderedFamily s_map(const OrderedFamily& out_family) {
    if (out_family.packets.front().role != PacketRole::out_like)
        throw std::invalid_argument("s_map: expects an out-like family");
    std::vector<Packet> flipped;
    for (auto it = out_family.packets.rbegin(); it != out_family.packets.rend(); ++it) {
        Packet q;
        q.label = it->label;
        q.profile = it->profile.reflected();
        q.role = PacketRole::in_like;
        flipped.push_back(std::move(q));
    }
    return OrderedFamily(std::move(flipped));
}

// <adag(h_1)..adag(h_n) Omega, adag(g_1)..adag(g_m) Omega> via the algebra.
inline cplx family_overlap(const std::vector<Packet>& bra, const std::vector<Packet>& ket,
                           const ModelParams& mp, const MomentumGrid& grid) {
    using namespace nlsdefect::rt;
    if (bra.empty() || ket.empty()) return 0.0;
    std::vector<Atom> atoms;
    Bindings bind;
    int var = 1;
    for (auto it = bra.rbegin(); it != bra.rend(); ++it) {  // adjoint reverses order
        atoms.push_back(make_a(sign(it->label), {var, +1}));
        const AnalyticProfile* prof = &it->profile;
        bind[var] = {Binding::integrate, 0.0,
                     [prof](double p) { return std::conj((*prof)(p)); }};
        ++var;
    }
    for (const auto& pk : ket) {
        atoms.push_back(make_adag(sign(pk.label), {var, +1}));
        const AnalyticProfile* prof = &pk.profile;
        bind[var] = {Binding::integrate, 0.0, [prof](double p) { return (*prof)(p); }};
        ++var;
    }
    return smeared_vev(Expression::word(std::move(atoms)), bind, mp, grid);
}

inline cplx transition_amplitude(const OrderedFamily& out_family, const OrderedFamily& in_family,
                                 const ModelParams& mp, const MomentumGrid& grid) {
    if (out_family.size() != in_family.size()) return 0.0;  // particle number conservation
    return family_overlap(out_family.packets, in_family.packets, mp, grid);
}

// ---- closed forms ----------------------------------------------------------

namespace detail {
// trapezoid over the packet's declared support at double density
inline cplx support_integral(const Packet& p, const std::function<cplx(double)>& f,
                             const MomentumGrid& grid) {
    const int n = 2 * grid.size();
    const double lo = p.profile.support_lo() - 1.0, hi = p.profile.support_hi() + 1.0;
    const double h = (hi - lo) / (n - 1);
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += w * h * f(lo + j * h);
    }
    return acc / two_pi;
}
}  // namespace detail

// one-particle amplitudes: reflection for equal labels, transmission across
inline cplx one_particle_amplitude(const Packet& h, const Packet& g, const ModelParams& mp,
                                   const MomentumGrid& grid) {
    if (h.role != PacketRole::out_like || g.role != PacketRole::in_like)
        throw std::invalid_argument("one_particle_amplitude: need (out, in) packets");
    const auto& hp = h.profile;
    const auto& gp = g.profile;
    if (h.label == g.label) {
        // same half-line: reflection; integral over R^alpha of hbar R g(-p)
        return detail::support_integral(
            h, [&](double p) { return std::conj(hp(p)) * defect_R(sign(h.label) * p, mp) * gp(-p); },
            grid);
    }
    // opposite: transmission, integral over the support of h
    return detail::support_integral(
        h, [&](double p) { return std::conj(hp(p)) * defect_T(sign(h.label) * p, mp) * gp(p); },
        grid);
}

// two-particle closed forms for same-label pairs (h1,h2 on R^a; g1,g2 roles
// as displayed): the all-same-side and the one-transmitted variants
inline cplx two_particle_amplitude(const OrderedFamily& out_family,
                                   const OrderedFamily& in_family, const ModelParams& mp,
                                   const MomentumGrid& grid) {
    if (out_family.size() != 2 || in_family.size() != 2)
        throw std::invalid_argument("two_particle_amplitude: need two packets per family");
    const Packet& h1 = out_family.packets[0];
    const Packet& h2 = out_family.packets[1];
    const Packet& g1 = in_family.packets[0];
    const Packet& g2 = in_family.packets[1];
    if (h1.label != h2.label || h1.label != g1.label)
        throw std::invalid_argument("two_particle_amplitude: unsupported label pattern");
    const int a = sign(h1.label);
    const bool same = g2.label == h1.label;

    // double integral over the h supports at double density
    const int n = 2 * grid.size();
    auto nodes = [&](const Packet& p) {
        std::vector<std::pair<double, double>> xs(static_cast<std::size_t>(n));
        const double lo = p.profile.support_lo() - 0.5, hi = p.profile.support_hi() + 0.5;
        const double h = (hi - lo) / (n - 1);
        for (int j = 0; j < n; ++j)
            xs[static_cast<std::size_t>(j)] = {lo + j * h, (j == 0 || j == n - 1) ? 0.5 * h : h};
        return xs;
    };
    const auto n1 = nodes(h1), n2 = nodes(h2);
    cplx acc = 0.0;
    for (const auto& [p1, w1] : n1) {
        for (const auto& [p2, w2] : n2) {
            const cplx hh = std::conj(h1.profile(p1)) * std::conj(h2.profile(p2));
            cplx term;
            if (same) {
                term = defect_R(a * p2, mp) * bulk_S(a * p1 + a * p2, mp) *
                           defect_R(a * p1, mp) * g1.profile(-p2) * g2.profile(-p1) +
                       defect_R(a * p1, mp) * bulk_S(a * p1 + a * p2, mp) *
                           bulk_S(a * p1 - a * p2, mp) * defect_R(a * p2, mp) *
                           g1.profile(-p1) * g2.profile(-p2);
            } else {
                term = defect_R(a * p2, mp) * bulk_S(a * p1 + a * p2, mp) *
                           defect_T(a * p1, mp) * g1.profile(-p2) * g2.profile(p1) +
                       defect_R(a * p1, mp) * bulk_S(a * p1 + a * p2, mp) *
                           bulk_S(a * p1 - a * p2, mp) * defect_T(a * p2, mp) *
                           g1.profile(-p1) * g2.profile(p2);
            }
            acc += w1 * w2 * hh * term;
        }
    }
    return acc / (two_pi * two_pi);
}

}  // namespace nlsdefect::scattering
