#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nlsdefect/profiles.hpp"
#include "nlsdefect/quadrature.hpp"

// Discretized Fock representation of the RT algebra. n-particle states are
// complex tensors over the momentum grid, one component per half-line label
// word; physical states satisfy the reflection-transmission constraint in the
// last slot and the S exchange constraint under adjacent swaps.
//
// Operator normalization: a(f) = sqrt(2n) int dp/2pi sum_alpha conj(f) phi and
// a^dag(f) = sqrt(2(n+1)) P(f (x) phi) with P the orthogonal projector. The
// sqrt(2) relative to the bare projector formula makes the represented
// exchange relations carry exactly the 2 pi delta weights of the algebra.

namespace nlsdefect::fock {

using nlsdefect::MomentumGrid;

// momentum-space smearing profile, one component per half-line label
struct SmearProfile {
    AnalyticProfile plus;
    AnalyticProfile minus;

    const AnalyticProfile& comp(int label) const { return label > 0 ? plus : minus; }

    static SmearProfile on(HalfLine a, AnalyticProfile f) {
        SmearProfile s;
        (a == HalfLine::plus ? s.plus : s.minus) = std::move(f);
        return s;
    }
};

class NParticleState {
  public:
    NParticleState(const MomentumGrid& grid, int n)
        : grid_(grid), n_(n), comp_(static_cast<std::size_t>(1) << n) {
        if (n < 1 || n > 4) throw std::invalid_argument("NParticleState: n out of range");
        std::size_t sz = 1;
        for (int j = 0; j < n; ++j) sz *= static_cast<std::size_t>(grid.size());
        for (auto& c : comp_) c.assign(sz, cplx(0.0));
    }

    int n() const { return n_; }
    const MomentumGrid& grid() const { return grid_; }
    int words() const { return 1 << n_; }

    // label of slot j in word w: +1 for bit 0, -1 for bit 1
    static int label_of(int word, int slot) { return (word >> slot) & 1 ? -1 : +1; }
    static int word_with(int word, int slot, int label) {
        const int bit = label < 0 ? 1 : 0;
        return (word & ~(1 << slot)) | (bit << slot);
    }

    std::size_t index(std::span<const int> idx) const {
        std::size_t r = 0;
        for (int j = 0; j < n_; ++j)
            r = r * static_cast<std::size_t>(grid_.size()) + static_cast<std::size_t>(idx[static_cast<std::size_t>(j)]);
        return r;
    }

    cplx& at(int word, std::span<const int> idx) { return comp_[static_cast<std::size_t>(word)][index(idx)]; }
    cplx at(int word, std::span<const int> idx) const {
        return comp_[static_cast<std::size_t>(word)][index(idx)];
    }
    std::vector<cplx>& data(int word) { return comp_[static_cast<std::size_t>(word)]; }
    const std::vector<cplx>& data(int word) const { return comp_[static_cast<std::size_t>(word)]; }

    template <typename F>
    void for_each_index(F&& f) const {
        std::vector<int> idx(static_cast<std::size_t>(n_), 0);
        const int M = grid_.size();
        while (true) {
            f(std::span<const int>(idx));
            int j = n_ - 1;
            while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == M) {
                idx[static_cast<std::size_t>(j)] = 0;
                --j;
            }
            if (j < 0) break;
        }
    }

    double weight(std::span<const int> idx) const {
        double w = 1.0;
        for (int j = 0; j < n_; ++j) w *= grid_.weight(idx[static_cast<std::size_t>(j)]) / two_pi;
        return w;
    }

    cplx inner(const NParticleState& o) const {
        if (!(grid_ == o.grid_) || n_ != o.n_)
            throw std::invalid_argument("NParticleState::inner: mismatched states");
        cplx acc = 0.0;
        for (int w = 0; w < words(); ++w) {
            const auto& a = comp_[static_cast<std::size_t>(w)];
            const auto& b = o.comp_[static_cast<std::size_t>(w)];
            std::size_t flat = 0;
            for_each_index([&](std::span<const int> idx) {
                acc += weight(idx) * std::conj(a[flat]) * b[flat];
                ++flat;
            });
        }
        return acc;
    }

    double norm() const { return std::sqrt(std::max(0.0, inner(*this).real())); }

    NParticleState& operator+=(const NParticleState& o) {
        for (int w = 0; w < words(); ++w)
            for (std::size_t i = 0; i < comp_[static_cast<std::size_t>(w)].size(); ++i)
                comp_[static_cast<std::size_t>(w)][i] += o.comp_[static_cast<std::size_t>(w)][i];
        return *this;
    }
    NParticleState& scale(cplx c) {
        for (auto& v : comp_)
            for (auto& x : v) x *= c;
        return *this;
    }

    // residual of the reflection-transmission constraint in the last slot
    double rt_prop_residual(const ModelParams& mp) const {
        double r = 0.0;
        const int last = n_ - 1;
        for (int w = 0; w < words(); ++w) {
            const int al = label_of(w, last);
            for_each_index([&](std::span<const int> idx) {
                const double p = grid_.node(idx[static_cast<std::size_t>(last)]);
                std::vector<int> mir(idx.begin(), idx.end());
                mir[static_cast<std::size_t>(last)] = grid_.mirror(idx[static_cast<std::size_t>(last)]);
                const cplx lhs = at(w, idx);
                const cplx rhs = defect_T(al * p, mp) * at(word_with(w, last, -al), idx) +
                                 defect_R(al * p, mp) * at(w, mir);
                r = std::max(r, std::abs(lhs - rhs));
            });
        }
        return r;
    }

    // residual of the S exchange constraint under adjacent swaps
    double s_prop_residual(const ModelParams& mp) const {
        double r = 0.0;
        for (int i = 0; i + 1 < n_; ++i) {
            for (int w = 0; w < words(); ++w) {
                const int ai = label_of(w, i), aj = label_of(w, i + 1);
                int wsw = word_with(w, i, aj);
                wsw = word_with(wsw, i + 1, ai);
                for_each_index([&](std::span<const int> idx) {
                    const double pi_ = grid_.node(idx[static_cast<std::size_t>(i)]);
                    const double pj = grid_.node(idx[static_cast<std::size_t>(i + 1)]);
                    std::vector<int> swi(idx.begin(), idx.end());
                    std::swap(swi[static_cast<std::size_t>(i)], swi[static_cast<std::size_t>(i + 1)]);
                    const cplx lhs = at(w, idx);
                    const cplx rhs = bulk_S(ai * pi_ - aj * pj, mp) * at(wsw, swi);
                    r = std::max(r, std::abs(lhs - rhs));
                });
            }
        }
        return r;
    }

  private:
    MomentumGrid grid_;
    int n_;
    std::vector<std::vector<cplx>> comp_;
};

// finite-particle vector: scalar vacuum component plus n >= 1 tensors
class FockElement {
  public:
    explicit FockElement(const MomentumGrid& grid, cplx vac = 0.0) : grid_(grid), scalar_(vac) {}

    static FockElement vacuum(const MomentumGrid& grid) { return FockElement(grid, 1.0); }

    const MomentumGrid& grid() const { return grid_; }
    cplx& scalar() { return scalar_; }
    cplx scalar() const { return scalar_; }
    int max_n() const { return static_cast<int>(comps_.size()); }

    NParticleState& component(int n) {
        while (max_n() < n) comps_.emplace_back(grid_, max_n() + 1);
        return comps_[static_cast<std::size_t>(n - 1)];
    }
    const NParticleState* component_if(int n) const {
        if (n < 1 || n > max_n()) return nullptr;
        return &comps_[static_cast<std::size_t>(n - 1)];
    }

    FockElement& operator+=(const FockElement& o) {
        scalar_ += o.scalar_;
        for (int n = 1; n <= o.max_n(); ++n) component(n) += *o.component_if(n);
        return *this;
    }
    FockElement& scale(cplx c) {
        scalar_ *= c;
        for (auto& s : comps_) s.scale(c);
        return *this;
    }

  private:
    MomentumGrid grid_;
    cplx scalar_;
    std::vector<NParticleState> comps_;
};

inline cplx inner_product(const FockElement& a, const FockElement& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("inner_product: grid mismatch");
    cplx acc = std::conj(a.scalar()) * b.scalar();
    const int nmax = std::min(a.max_n(), b.max_n());
    for (int n = 1; n <= nmax; ++n) acc += a.component_if(n)->inner(*b.component_if(n));
    return acc;
}

inline double norm(const FockElement& a) {
    return std::sqrt(std::max(0.0, inner_product(a, a).real()));
}

namespace detail {

// creation with a per-slot kernel lookup:
//   lookup(label, node index or mirrored, rest word, rest indices) -> value
// rest = the output slots other than the created one, in order.
struct CreateKernel {
    // value of the smearing column f_beta at node p (sign<0: mirrored node)
    std::function<cplx(int beta, int node, int mirrored, int rest_word,
                       std::span<const int> rest_idx)>
        value;
};

inline NParticleState create_impl(const MomentumGrid& grid, const ModelParams& mp, int n_out,
                                  const NParticleState* prev, const CreateKernel& ker) {
    NParticleState out(grid, n_out);
    const double norm = 1.0 / std::sqrt(2.0 * n_out);
    std::vector<int> rest(static_cast<std::size_t>(n_out - 1));
    out.for_each_index([&](std::span<const int> idx) {
        for (int w = 0; w < out.words(); ++w) {
            cplx acc = 0.0;
            for (int k = 0; k < n_out; ++k) {
                // S string prod_{j<k} S(a_j p_j - a_k p_k)
                const int ak = NParticleState::label_of(w, k);
                const double pk = grid.node(idx[static_cast<std::size_t>(k)]);
                cplx str = 1.0;
                for (int j = 0; j < k; ++j) {
                    const int aj = NParticleState::label_of(w, j);
                    const double pj = grid.node(idx[static_cast<std::size_t>(j)]);
                    str *= bulk_S(aj * pj - ak * pk, mp);
                }
                // C_k = prod_{j != k} S(a_k p_k - a_j p_j) S(a_j p_j + a_k p_k)
                cplx ck = 1.0;
                for (int j = 0; j < n_out; ++j) {
                    if (j == k) continue;
                    const int aj = NParticleState::label_of(w, j);
                    const double pj = grid.node(idx[static_cast<std::size_t>(j)]);
                    ck *= bulk_S(ak * pk - aj * pj, mp) * bulk_S(aj * pj + ak * pk, mp);
                }
                // rest word/indices: slots != k in order
                int rw = 0;
                int rpos = 0;
                for (int j = 0; j < n_out; ++j) {
                    if (j == k) continue;
                    if (NParticleState::label_of(w, j) < 0) rw |= 1 << rpos;
                    rest[static_cast<std::size_t>(rpos)] = idx[static_cast<std::size_t>(j)];
                    ++rpos;
                }
                const cplx prevval =
                    prev ? prev->at(rw, std::span<const int>(rest)) : cplx(1.0);
                if (prevval == cplx(0.0)) continue;
                const int node = idx[static_cast<std::size_t>(k)];
                const int mir = grid.mirror(node);
                const cplx fslot =
                    ker.value(ak, node, 0, rw, rest) +
                    ck * (defect_T(ak * pk, mp) * ker.value(-ak, node, 0, rw, rest) +
                          defect_R(ak * pk, mp) * ker.value(ak, mir, 1, rw, rest));
                acc += str * fslot * prevval;
            }
            out.at(w, idx) = norm * acc;
        }
    });
    return out;
}

}  // namespace detail

// a^dag(f): raises every component by one particle.
inline FockElement create(const FockElement& phi, const SmearProfile& f, const ModelParams& mp) {
    const MomentumGrid& grid = phi.grid();
    // sample the profile once
    std::vector<cplx> fp(static_cast<std::size_t>(grid.size())), fm(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) {
        fp[static_cast<std::size_t>(i)] = f.plus(grid.node(i));
        fm[static_cast<std::size_t>(i)] = f.minus(grid.node(i));
    }
    detail::CreateKernel ker;
    ker.value = [&fp, &fm](int beta, int node, int, int, std::span<const int>) {
        return beta > 0 ? fp[static_cast<std::size_t>(node)] : fm[static_cast<std::size_t>(node)];
    };
    FockElement out(grid);
    if (phi.scalar() != cplx(0.0)) {
        NParticleState one = detail::create_impl(grid, mp, 1, nullptr, ker);
        one.scale(phi.scalar());
        out.component(1) += one;
    }
    for (int n = 1; n <= phi.max_n(); ++n) {
        const NParticleState* prev = phi.component_if(n);
        NParticleState next = detail::create_impl(grid, mp, n + 1, prev, ker);
        out.component(n + 1) += next;
    }
    return out;
}

// a(f): lowers every component by one particle; a(f) Omega = 0.
inline FockElement annihilate(const FockElement& phi, const SmearProfile& f,
                              const ModelParams& mp) {
    (void)mp;
    const MomentumGrid& grid = phi.grid();
    FockElement out(grid);
    for (int n = 1; n <= phi.max_n(); ++n) {
        const NParticleState& src = *phi.component_if(n);
        const double fac = std::sqrt(2.0 * n);
        if (n == 1) {
            cplx acc = 0.0;
            for (int w = 0; w < 2; ++w) {
                const int al = NParticleState::label_of(w, 0);
                for (int i = 0; i < grid.size(); ++i) {
                    const int idx[1] = {i};
                    acc += grid.weight(i) / two_pi *
                           std::conj(f.comp(al)(grid.node(i))) * src.at(w, idx);
                }
            }
            out.scalar() += fac * acc;
            continue;
        }
        NParticleState dst(grid, n - 1);
        dst.for_each_index([&](std::span<const int> rest) {
            std::vector<int> idx(static_cast<std::size_t>(n));
            std::copy(rest.begin(), rest.end(), idx.begin() + 1);
            for (int rw = 0; rw < dst.words(); ++rw) {
                cplx acc = 0.0;
                for (int al : {+1, -1}) {
                    const int w = (rw << 1) | (al < 0 ? 1 : 0);
                    for (int i = 0; i < grid.size(); ++i) {
                        idx[0] = i;
                        acc += grid.weight(i) / two_pi *
                               std::conj(f.comp(al)(grid.node(i))) *
                               src.at(w, std::span<const int>(idx));
                    }
                }
                dst.at(rw, rest) += fac * acc;
            }
        });
        out.component(n - 1) += dst;
    }
    return out;
}

// defect generators as multiplicative operators
enum class DefectKind { reflect, transmit };

inline FockElement defect_apply(const FockElement& phi, DefectKind which, double p,
                                const ModelParams& mp) {
    const MomentumGrid& grid = phi.grid();
    FockElement out(grid);
    const cplx vac = which == DefectKind::reflect ? defect_R(p, mp) : defect_T(p, mp);
    out.scalar() = vac * phi.scalar();
    for (int n = 1; n <= phi.max_n(); ++n) {
        const NParticleState& src = *phi.component_if(n);
        NParticleState dst(grid, n);
        dst.for_each_index([&](std::span<const int> idx) {
            for (int w = 0; w < dst.words(); ++w) {
                cplx fac = vac;
                for (int j = 0; j < n; ++j) {
                    const int aj = NParticleState::label_of(w, j);
                    const double pj = grid.node(idx[static_cast<std::size_t>(j)]);
                    fac *= bulk_S(p - aj * pj, mp) * bulk_S(aj * pj + p, mp);
                }
                dst.at(w, idx) = fac * src.at(w, idx);
            }
        });
        out.component(n) += dst;
    }
    return out;
}

// time-smeared creator: create() with the momentum profile of f evolved by
// the free quadratic phase, component-wise exact for the analytic family.
inline SmearProfile tilde_profile(double t, const SmearProfile& f_position) {
    SmearProfile s;
    s.plus = f_position.plus.empty()
                 ? AnalyticProfile::zero()
                 : f_position.plus.fourier().times_exp(iu * t, 0.0);
    s.minus = f_position.minus.empty()
                  ? AnalyticProfile::zero()
                  : f_position.minus.fourier().times_exp(iu * t, 0.0);
    return s;
}

inline FockElement tilde_create(const FockElement& phi, double t, const SmearProfile& f_position,
                                const ModelParams& mp) {
    return create(phi, tilde_profile(t, f_position), mp);
}

// matrix elements <phi, Phi_alpha(t, x) psi> for one-particle chi reduce to a
// single momentum integral of the chi component (used for the quantum
// boundary conditions).
inline cplx bc_matrix_element(const NParticleState& chi, HalfLine alpha, double t, double x,
                              bool derivative = false) {
    if (chi.n() != 1) throw std::invalid_argument("bc_matrix_element: need a 1-particle state");
    const MomentumGrid& grid = chi.grid();
    const int w = alpha == HalfLine::plus ? 0 : 1;
    cplx acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double p = grid.node(i);
        const int idx[1] = {i};
        cplx f = std::exp(iu * (p * x - p * p * t)) * chi.at(w, idx);
        if (derivative) f *= iu * p;
        acc += grid.weight(i) / two_pi * f;
    }
    return acc;
}

}  // namespace nlsdefect::fock
