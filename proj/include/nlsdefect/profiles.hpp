#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "nlsdefect/kernels.hpp"

// Analytic momentum/position profiles: finite sums of terms
//     amp * (u - c)^k * exp(-a (u - s)^2 + b (u - s)),   s real, Re a > 0.
// The family is closed under u -> -u, complex conjugation (on the real
// line), differentiation, multiplication by Gaussians and quadratic phases,
// and the Fourier transform, so every operation the spectral construction
// needs is evaluated in closed form. The real shift s keeps exponents small.

namespace nlsdefect {

struct GaussTerm {
    cplx amp{0.0};
    int k = 0;      // polynomial degree of the (u - c)^k factor
    cplx c{0.0};    // polynomial shift
    cplx a{1.0};    // Gaussian coefficient, Re a > 0
    double s = 0.0; // real exponent center
    cplx b{0.0};    // linear exponent coefficient (in u - s)

    cplx eval(cplx u) const {
        cplx poly = 1.0;
        const cplx d = u - c;
        for (int j = 0; j < k; ++j) poly *= d;
        const cplx y = u - s;
        return amp * poly * std::exp(-a * y * y + b * y);
    }
};

// Moments I_m(A, B) = int u^m exp(-A u^2 + B u) du over the real line, Re A > 0.
inline std::vector<cplx> gauss_moments(cplx A, cplx B, int mmax) {
    if (!(A.real() > 0.0)) throw std::invalid_argument("gauss_moments: Re A must be > 0");
    std::vector<cplx> I(static_cast<std::size_t>(mmax) + 1);
    I[0] = std::sqrt(pi / A) * std::exp(B * B / (4.0 * A));
    if (mmax >= 1) I[1] = B / (2.0 * A) * I[0];
    for (int m = 2; m <= mmax; ++m)
        I[m] = (B * I[m - 1] + double(m - 1) * I[m - 2]) / (2.0 * A);
    return I;
}

namespace detail {
inline double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * double(n - k + j) / double(j);
    return r;
}
}  // namespace detail

class AnalyticProfile {
  public:
    AnalyticProfile() = default;
    explicit AnalyticProfile(std::vector<GaussTerm> terms, double support_lo = 0.0,
                             double support_hi = 0.0)
        : terms_(std::move(terms)), lo_(support_lo), hi_(support_hi) {}

    // amp * (u - center)^deg * exp(-(u - center)^2 / width^2)
    static AnalyticProfile bump(cplx amp, double center, double width, int deg = 0) {
        if (!(width > 0.0)) throw std::invalid_argument("AnalyticProfile: width must be > 0");
        GaussTerm t;
        t.amp = amp;
        t.k = deg;
        t.c = center;
        t.a = 1.0 / (width * width);
        t.s = center;
        t.b = 0.0;
        const double tail_halfwidth = width * 6.5;  // exp(-42) ~ 5e-19
        return AnalyticProfile({t}, center - tail_halfwidth, center + tail_halfwidth);
    }

    static AnalyticProfile zero() { return AnalyticProfile(); }

    bool empty() const { return terms_.empty(); }
    const std::vector<GaussTerm>& terms() const { return terms_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    void set_support(double lo, double hi) { lo_ = lo; hi_ = hi; }

    cplx operator()(double u) const { return eval(cplx(u)); }
    cplx eval(cplx u) const {
        cplx acc = 0.0;
        for (const auto& t : terms_) acc += t.eval(u);
        return acc;
    }
    // Value of the conjugated profile, continued off the real line.
    cplx conj_eval(cplx u) const { return std::conj(eval(std::conj(u))); }

    AnalyticProfile operator+(const AnalyticProfile& o) const {
        if (terms_.empty()) return o;
        if (o.terms_.empty()) return *this;
        std::vector<GaussTerm> t = terms_;
        t.insert(t.end(), o.terms_.begin(), o.terms_.end());
        return AnalyticProfile(std::move(t), std::min(lo_, o.lo_), std::max(hi_, o.hi_));
    }

    AnalyticProfile scaled(cplx sc) const {
        auto t = terms_;
        for (auto& x : t) x.amp *= sc;
        return AnalyticProfile(std::move(t), lo_, hi_);
    }

    // u -> -u
    AnalyticProfile reflected() const {
        auto t = terms_;
        for (auto& x : t) {
            if (x.k % 2 != 0) x.amp = -x.amp;
            x.c = -x.c;
            x.s = -x.s;
            x.b = -x.b;
        }
        return AnalyticProfile(std::move(t), -hi_, -lo_);
    }

    // Complex conjugate as a function on the real line.
    AnalyticProfile conjugated() const {
        auto t = terms_;
        for (auto& x : t) {
            x.amp = std::conj(x.amp);
            x.c = std::conj(x.c);
            x.a = std::conj(x.a);
            x.b = std::conj(x.b);
        }
        return AnalyticProfile(std::move(t), lo_, hi_);
    }

    // Multiply by exp(sig u^2 + w u); requires Re(a - sig) > 0 to stay integrable.
    AnalyticProfile times_exp(cplx sig, cplx w) const {
        auto t = terms_;
        for (auto& x : t) {
            // sig u^2 + w u = sig y^2 + (2 sig s + w) y + (sig s^2 + w s),  y = u - s
            x.amp *= std::exp(sig * x.s * x.s + w * x.s);
            x.a -= sig;
            x.b += 2.0 * sig * x.s + w;
        }
        return AnalyticProfile(std::move(t), lo_, hi_);
    }

    AnalyticProfile derivative() const {
        std::vector<GaussTerm> out;
        out.reserve(terms_.size() * 3);
        for (const auto& x : terms_) {
            if (x.k > 0) {
                GaussTerm d = x;
                d.amp *= double(x.k);
                d.k = x.k - 1;
                out.push_back(d);
            }
            // (-2a(u-s) + b)(u-c)^k = -2a (u-c)^{k+1} + (b - 2a(c - s))(u-c)^k
            GaussTerm e = x;
            e.amp *= (x.b - 2.0 * x.a * (x.c - x.s));
            out.push_back(e);
            GaussTerm f = x;
            f.amp *= -2.0 * x.a;
            f.k = x.k + 1;
            out.push_back(f);
        }
        return AnalyticProfile(std::move(out), lo_, hi_);
    }

    // int f(u) du in closed form.
    cplx integral() const {
        cplx acc = 0.0;
        for (const auto& x : terms_) {
            // shift y = u - s; (u - c)^k = (y - (c - s))^k
            const cplx cs = x.c - x.s;
            const auto I = gauss_moments(x.a, x.b, x.k);
            cplx pw = 1.0;  // (-(c-s))^{k-j}
            for (int j = x.k; j >= 0; --j) {
                acc += x.amp * detail::binom(x.k, j) * pw * I[static_cast<std::size_t>(j)];
                pw *= -cs;
            }
        }
        return acc;
    }

    // Fourier transform fhat(p) = int f(x) e^{-ipx} dx, again in the family.
    AnalyticProfile fourier() const {
        std::vector<GaussTerm> out;
        for (const auto& x : terms_) {
            // y = u - s, c' = c - s:
            //   e^{-ips} int (y - c')^k e^{-a y^2 + (b - ip) y} dy
            // z = y - c':
            //   e^{-ips} e^{-a c'^2 + (b-ip) c'} int z^k e^{-a z^2 + gamma(p) z} dz
            // with gamma(p) = b - 2 a c' - i p.
            const cplx a = x.a;
            const cplx cp = x.c - x.s;
            const cplx g0 = x.b - 2.0 * a * cp;
            const cplx g1 = -iu;
            // moment polynomials in p relative to the I_0 factor
            struct Poly {
                std::vector<cplx> co;
            };
            auto mul_lin = [](const Poly& q, cplx c0, cplx c1) {
                Poly r;
                r.co.assign(q.co.size() + 1, cplx(0.0));
                for (std::size_t j = 0; j < q.co.size(); ++j) {
                    r.co[j] += c0 * q.co[j];
                    r.co[j + 1] += c1 * q.co[j];
                }
                return r;
            };
            std::vector<Poly> M(static_cast<std::size_t>(x.k) + 1);
            M[0].co = {cplx(1.0)};
            if (x.k >= 1) M[1] = mul_lin(M[0], g0 / (2.0 * a), g1 / (2.0 * a));
            for (int m = 2; m <= x.k; ++m) {
                Poly t1 = mul_lin(M[static_cast<std::size_t>(m - 1)], g0 / (2.0 * a), g1 / (2.0 * a));
                const Poly& t2 = M[static_cast<std::size_t>(m - 2)];
                if (t1.co.size() < t2.co.size()) t1.co.resize(t2.co.size(), cplx(0.0));
                for (std::size_t j = 0; j < t2.co.size(); ++j)
                    t1.co[j] += double(m - 1) / (2.0 * a) * t2.co[j];
                M[static_cast<std::size_t>(m)] = std::move(t1);
            }
            // exponent in p: gamma^2/4a - i p (s + c')
            //   = g0^2/4a + [g0 g1 / 2a - i (s + c')] p + (g1^2 / 4a) p^2
            const cplx Ap = -g1 * g1 / (4.0 * a);  // = 1/(4a)
            const cplx Bp = g0 * g1 / (2.0 * a) - iu * (x.s + cp);
            const cplx const_exp = -a * cp * cp + x.b * cp + g0 * g0 / (4.0 * a);
            if (!(Ap.real() > 0.0))
                throw std::runtime_error("AnalyticProfile::fourier: degenerate Gaussian");
            // recenter the p-Gaussian at its real peak
            const double sp = Bp.real() / (2.0 * Ap.real());
            const cplx amp0 = x.amp * std::sqrt(pi / a) *
                              std::exp(const_exp - Ap * sp * sp + Bp * sp);
            const cplx bp = Bp - 2.0 * Ap * sp;
            const auto& top = M[static_cast<std::size_t>(x.k)];
            for (std::size_t j = 0; j < top.co.size(); ++j) {
                if (top.co[j] == cplx(0.0)) continue;
                GaussTerm t;
                t.amp = amp0 * top.co[j];
                t.k = static_cast<int>(j);
                t.c = 0.0;
                t.a = Ap;
                t.s = sp;
                t.b = bp;
                out.push_back(t);
            }
        }
        AnalyticProfile r(std::move(out));
        double wmax = 1.0, smax = 0.0;
        for (const auto& t : r.terms_) {
            wmax = std::max(wmax, std::sqrt(std::abs(1.0 / t.a.real())));
            smax = std::max(smax, std::abs(t.s));
        }
        r.lo_ = -smax - 8.0 * wmax;
        r.hi_ = smax + 8.0 * wmax;
        return r;
    }

    // Tail bound check: |f| sampled outside the declared support.
    double max_tail(int samples = 64, double reach = 4.0) const {
        double m = 0.0;
        const double w = hi_ - lo_;
        for (int j = 0; j < samples; ++j) {
            const double sdist = (j + 1.0) / samples * reach * std::max(w, 1.0);
            m = std::max(m, std::abs((*this)(hi_ + sdist)));
            m = std::max(m, std::abs((*this)(lo_ - sdist)));
        }
        return m;
    }

  private:
    std::vector<GaussTerm> terms_;
    double lo_ = 0.0, hi_ = 0.0;
};

// Product of two terms as a term sum (shared recentered exponent).
inline void append_term_product(std::vector<GaussTerm>& out, const GaussTerm& t1,
                                const GaussTerm& t2) {
    const cplx A = t1.a + t2.a;
    const cplx B = 2.0 * t1.a * t1.s + t1.b + 2.0 * t2.a * t2.s + t2.b;
    const cplx C = -t1.a * t1.s * t1.s - t1.b * t1.s - t2.a * t2.s * t2.s - t2.b * t2.s;
    // recenter: -A u^2 + B u + C = -A (u-s)^2 + b (u-s) + (C - A s^2 + B s) ... const into amp
    const double s = B.real() / (2.0 * A.real());
    const cplx b = B - 2.0 * A * s;
    const cplx amp = t1.amp * t2.amp * std::exp(C - A * s * s + B * s);
    if (amp == cplx(0.0)) return;  // underflow of far-separated factors
    GaussTerm t;
    t.k = t1.k + t2.k;
    t.a = A;
    t.s = s;
    t.b = b;
    // expand (u-c1)^k1 (u-c2)^k2 in powers of (u - s): polynomial convolution
    auto expand = [&](cplx c, int k) {
        std::vector<cplx> co(static_cast<std::size_t>(k) + 1, cplx(0.0));
        // (u-c)^k = ((u-s) + (s-c))^k
        cplx pw = 1.0;
        for (int j = k; j >= 0; --j) {
            co[static_cast<std::size_t>(j)] = detail::binom(k, j) * pw;
            pw *= (s - c);
        }
        return co;
    };
    const auto c1 = expand(t1.c, t1.k);
    const auto c2 = expand(t2.c, t2.k);
    std::vector<cplx> prod(c1.size() + c2.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < c1.size(); ++i)
        for (std::size_t j = 0; j < c2.size(); ++j) prod[i + j] += c1[i] * c2[j];
    for (std::size_t m = 0; m < prod.size(); ++m) {
        if (prod[m] == cplx(0.0)) continue;
        GaussTerm tm = t;
        tm.amp = amp * prod[m];
        tm.k = static_cast<int>(m);
        tm.c = s;  // powers of (u - s)
        out.push_back(tm);
    }
}

// L2-type pairing int conj(f) g du in closed form.
inline cplx profile_inner(const AnalyticProfile& f, const AnalyticProfile& g) {
    std::vector<GaussTerm> terms;
    const auto fc = f.conjugated();
    for (const auto& tf : fc.terms())
        for (const auto& tg : g.terms()) append_term_product(terms, tf, tg);
    return AnalyticProfile(std::move(terms)).integral();
}

inline double profile_norm(const AnalyticProfile& f) {
    return std::sqrt(std::max(0.0, profile_inner(f, f).real()));
}

// Random Gaussian-polynomial profile with support inside [lo, hi].
inline AnalyticProfile random_profile(std::mt19937_64& rng, double lo, double hi, int nterms = 2,
                                      int max_deg = 2) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    AnalyticProfile f = AnalyticProfile::zero();
    const double span = hi - lo;
    for (int t = 0; t < nterms; ++t) {
        const double width = span * (0.04 + 0.03 * unit(rng));
        const double margin = 6.6 * width;
        const double center = lo + margin + (span - 2.0 * margin) * unit(rng);
        const int deg = static_cast<int>(unit(rng) * (max_deg + 1));
        const cplx amp = cplx(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
        f = f + AnalyticProfile::bump(amp, center, width, deg);
    }
    f.set_support(lo, hi);
    return f;
}

}  // namespace nlsdefect
