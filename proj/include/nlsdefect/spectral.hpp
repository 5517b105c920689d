#pragma once

#include <cmath>
#include <stdexcept>

#include "nlsdefect/kernels.hpp"
#include "nlsdefect/profiles.hpp"

// Spectral data of the classical solution: seeds (mu0, mu1) with mu1 even,
// the derived pair mu_pm, the half-line profiles lambda_pm tied together by
// the reflection-transmission constraint, and the diagonalizing combinations
// beta_pm. Values and first two derivatives are exact (closed forms).

namespace nlsdefect {

struct SeedProfiles {
    AnalyticProfile mu0;
    AnalyticProfile mu1;  // must be even

    double evenness_defect(int samples = 41, double range = 6.0) const {
        double r = 0.0;
        for (int j = 0; j < samples; ++j) {
            const double p = -range + 2.0 * range * j / (samples - 1);
            r = std::max(r, std::abs(mu1(p) - mu1(-p)));
        }
        return r;
    }
};

class SpectralProfiles {
  public:
    SpectralProfiles(SeedProfiles seeds, ModelParams params)
        : params_(params),
          mu0_{seeds.mu0, seeds.mu0.derivative()},
          mu1_{seeds.mu1, seeds.mu1.derivative()} {
        params_.validate();
        const double even = seeds.evenness_defect();
        if (even > 1e-10)
            throw std::invalid_argument("SpectralProfiles: mu1 is not even");
        mu0_[2] = mu0_[1].derivative();
        mu1_[2] = mu1_[1].derivative();
    }

    const ModelParams& params() const { return params_; }

    // mu_s(k) = s (mu0(s k) + (k - s i eta) mu1(k)) / (k - s i eta + 1), s = +/-1.
    cplx mu(int s, double k, int order = 0) const {
        const cplx shift = cplx(0.0, -s * params_.eta);
        const cplx den = k + shift + 1.0;
        const cplx n0 = mu0_[0](s * k) + (k + shift) * mu1_[0](k);
        if (order == 0) return double(s) * n0 / den;
        const cplx n1 = double(s) * mu0_[1](s * k) + mu1_[0](k) + (k + shift) * mu1_[1](k);
        if (order == 1) return double(s) * (n1 / den - n0 / (den * den));
        const cplx n2 = mu0_[2](s * k) + 2.0 * mu1_[1](k) + (k + shift) * mu1_[2](k);
        if (order == 2)
            return double(s) * (n2 / den - 2.0 * n1 / (den * den) + 2.0 * n0 / (den * den * den));
        throw std::invalid_argument("SpectralProfiles::mu: order > 2");
    }

    // T, R and derivatives. T' = R' = i eta / (p + i eta)^2; T'' = R'' = -2 i eta/(p+i eta)^3.
    cplx T(double p, int order = 0) const {
        if (params_.eta == 0.0) return order == 0 ? cplx(1.0) : cplx(0.0);
        const cplx d = p + iu * params_.eta;
        if (order == 0) return p / d;
        if (order == 1) return iu * params_.eta / (d * d);
        return -2.0 * iu * params_.eta / (d * d * d);
    }
    cplx R(double p, int order = 0) const {
        if (params_.eta == 0.0) return 0.0;
        const cplx d = p + iu * params_.eta;
        if (order == 0) return -iu * params_.eta / d;
        if (order == 1) return iu * params_.eta / (d * d);
        return -2.0 * iu * params_.eta / (d * d * d);
    }

    // lambda_+(p) = mu_+(p) + T(p) mu_-(p) + R(p) mu_+(-p)
    // lambda_-(p) = mu_-(p) + T(-p) mu_+(p) + R(-p) mu_-(-p)
    cplx lambda(HalfLine alpha, double p, int order = 0) const {
        const int s = sign(alpha);
        auto prod_d = [order](cplx f0, cplx f1, cplx f2, cplx g0, cplx g1, cplx g2) {
            if (order == 0) return f0 * g0;
            if (order == 1) return f1 * g0 + f0 * g1;
            return f2 * g0 + 2.0 * f1 * g1 + f0 * g2;
        };
        if (order > 2) throw std::invalid_argument("SpectralProfiles::lambda: order > 2");
        // kernel arguments carry sign s; mirrored mu arguments carry -p.
        const cplx t0 = T(s * p, 0), t1 = double(s) * T(s * p, 1), t2 = T(s * p, 2);
        const cplx r0 = R(s * p, 0), r1 = double(s) * R(s * p, 1), r2 = R(s * p, 2);
        const cplx mo0 = mu(-s, p, 0), mo1 = mu(-s, p, 1), mo2 = mu(-s, p, 2);
        const cplx mm0 = mu(s, -p, 0), mm1 = -mu(s, -p, 1), mm2 = mu(s, -p, 2);
        cplx own;
        if (order == 0) own = mu(s, p, 0);
        else if (order == 1) own = mu(s, p, 1);
        else own = mu(s, p, 2);
        return own + prod_d(t0, t1, t2, mo0, mo1, mo2) + prod_d(r0, r1, r2, mm0, mm1, mm2);
    }

    // beta_{+/-}(p) = (lambda_+(p) +/- lambda_-(-p)) / 2
    cplx beta(HalfLine alpha, double p, int order = 0) const {
        const double par = (order % 2 == 0) ? 1.0 : -1.0;
        const cplx lm = par * lambda(HalfLine::minus, -p, order);
        const cplx lp = lambda(HalfLine::plus, p, order);
        return alpha == HalfLine::plus ? 0.5 * (lp + lm) : 0.5 * (lp - lm);
    }

    // Residual families certifying the construction.
    double relation_rt_residual(double p) const {
        double r = 0.0;
        for (HalfLine a : {HalfLine::plus, HalfLine::minus}) {
            const int s = sign(a);
            const cplx lhs = lambda(a, p);
            const cplx rhs = T(s * p) * lambda(flip(a), p) + R(s * p) * lambda(a, -p);
            r = std::max(r, std::abs(lhs - rhs));
        }
        return r;
    }
    double prop_beta_residual(double p) const {
        double r = 0.0;
        for (HalfLine a : {HalfLine::plus, HalfLine::minus})
            r = std::max(r, std::abs(beta(a, p) - b_alpha(p, a, params_) * beta(a, -p)));
        return r;
    }
    // The Appendix A bracket beta_+(-k)/(k + i eta) - beta_-(-k); vanishes for
    // seeds of the mu-form with mu1 even.
    double bracket_residual(double k) const {
        const cplx den = k + iu * params_.eta;
        if (std::abs(den) < 1e-12) return 0.0;
        return std::abs(beta(HalfLine::plus, -k) / den - beta(HalfLine::minus, -k));
    }

    struct InvariantReport {
        double relation_rt = 0.0;
        double prop_beta = 0.0;
        double bracket = 0.0;
        double max() const { return std::max(relation_rt, std::max(prop_beta, bracket)); }
    };

    InvariantReport verify_invariants(std::span<const double> momenta) const {
        InvariantReport rep;
        for (double p : momenta) {
            rep.relation_rt = std::max(rep.relation_rt, relation_rt_residual(p));
            rep.prop_beta = std::max(rep.prop_beta, prop_beta_residual(p));
            rep.bracket = std::max(rep.bracket, bracket_residual(p));
        }
        return rep;
    }

    // Nominal momentum support radius of the lambda data.
    double support_radius() const {
        double r = 4.0;
        r = std::max(r, std::abs(mu0_[0].support_lo()));
        r = std::max(r, std::abs(mu0_[0].support_hi()));
        r = std::max(r, std::abs(mu1_[0].support_lo()));
        r = std::max(r, std::abs(mu1_[0].support_hi()));
        return r;
    }

  private:
    ModelParams params_;
    AnalyticProfile mu0_[3];
    AnalyticProfile mu1_[3];
};

inline SpectralProfiles build_profiles(const SeedProfiles& seeds, const ModelParams& params) {
    return SpectralProfiles(seeds, params);
}

}  // namespace nlsdefect
