#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

// Closed-form momentum-space kernels of the delta-defect NLS model:
// the bulk two-body amplitude S, the defect transmission/reflection pair
// (T, R) and the auxiliary reflection amplitude B_alpha, together with
// residual checks for the algebraic identities they satisfy.

namespace nlsdefect {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr cplx iu{0.0, 1.0};

struct ModelParams {
    double g = 0.05;   // bulk coupling, > 0
    double eta = 1.0;  // defect strength, >= 0 (eta = 0: pure transmission)

    void validate() const {
        if (!(g > 0.0)) throw std::invalid_argument("ModelParams: g must be > 0");
        if (!(eta >= 0.0)) throw std::invalid_argument("ModelParams: eta must be >= 0");
    }
};

// Half-line label alpha = +/- 1. Negation is an involution by construction.
enum class HalfLine : int { minus = -1, plus = +1 };

inline constexpr int sign(HalfLine a) { return static_cast<int>(a); }
inline constexpr HalfLine flip(HalfLine a) {
    return a == HalfLine::plus ? HalfLine::minus : HalfLine::plus;
}
inline constexpr char label_char(HalfLine a) { return a == HalfLine::plus ? '+' : '-'; }

// S(p) = (p - ig)/(p + ig). Unimodular on the real line.
inline cplx bulk_S(double p, const ModelParams& mp) {
    return (p - iu * mp.g) / (p + iu * mp.g);
}

// T(p) = p/(p + i eta), R(p) = -i eta/(p + i eta).
// The p = 0, eta = 0 corner is fixed to (1, 0), the eta -> 0 limit.
inline cplx defect_T(double p, const ModelParams& mp) {
    if (mp.eta == 0.0) return 1.0;
    return p / (p + iu * mp.eta);
}

inline cplx defect_R(double p, const ModelParams& mp) {
    if (mp.eta == 0.0) return 0.0;
    return -iu * mp.eta / (p + iu * mp.eta);
}

inline std::pair<cplx, cplx> defect_TR(double p, const ModelParams& mp) {
    return {defect_T(p, mp), defect_R(p, mp)};
}

// B_alpha(p) = alpha (p - i alpha eta)/(p + i eta); B_- is identically -1.
inline cplx b_alpha(double p, HalfLine alpha, const ModelParams& mp) {
    if (alpha == HalfLine::minus) return -1.0;
    if (mp.eta == 0.0) return 1.0;
    return (p - iu * mp.eta) / (p + iu * mp.eta);
}

// Diagonal two-particle matrix: entries S(a1 p1 - a2 p2) on C^2 (x) C^2,
// row/column index = 2*(a1==-) + (a2==-).
using Mat4 = std::array<std::array<cplx, 4>, 4>;
using Mat8 = std::array<std::array<cplx, 8>, 8>;

namespace detail {
inline constexpr int half_sign(int bit) { return bit == 0 ? +1 : -1; }

template <std::size_t N>
std::array<std::array<cplx, N>, N> matmul(const std::array<std::array<cplx, N>, N>& a,
                                          const std::array<std::array<cplx, N>, N>& b) {
    std::array<std::array<cplx, N>, N> c{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const cplx aik = a[i][k];
            if (aik == cplx(0.0)) continue;
            for (std::size_t j = 0; j < N; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

template <std::size_t N>
double max_abs_minus_identity(const std::array<std::array<cplx, N>, N>& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const cplx want = (i == j) ? cplx(1.0) : cplx(0.0);
            r = std::max(r, std::abs(m[i][j] - want));
        }
    return r;
}

template <std::size_t N>
double max_abs_diff(const std::array<std::array<cplx, N>, N>& a,
                    const std::array<std::array<cplx, N>, N>& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r = std::max(r, std::abs(a[i][j] - b[i][j]));
    return r;
}
}  // namespace detail

inline Mat4 smatrix2(double p1, double p2, const ModelParams& mp) {
    Mat4 m{};
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
            const int idx = 2 * b1 + b2;
            m[idx][idx] = bulk_S(detail::half_sign(b1) * p1 - detail::half_sign(b2) * p2, mp);
        }
    return m;
}

// Embeddings of the two-particle matrix into the three-particle space C^8,
// acting on slots (i, j) of the label triple.
inline Mat8 smatrix3(double pi_, double pj, int sloti, int slotj, const ModelParams& mp) {
    Mat8 m{};
    for (int b0 = 0; b0 < 2; ++b0)
        for (int b1 = 0; b1 < 2; ++b1)
            for (int b2 = 0; b2 < 2; ++b2) {
                const int bits[3] = {b0, b1, b2};
                const int idx = 4 * b0 + 2 * b1 + b2;
                m[idx][idx] = bulk_S(detail::half_sign(bits[sloti]) * pi_ -
                                         detail::half_sign(bits[slotj]) * pj,
                                     mp);
            }
    return m;
}

// |S12(p1,p2) S21(p2,p1) - 1| over the 4x4 representation.
inline double smatrix_unitarity_residual(double p1, double p2, const ModelParams& mp) {
    Mat4 s12 = smatrix2(p1, p2, mp);
    Mat4 s21{};
    // S21 swaps the roles of the two slots: entry (a1,a2) is S(a2 p2 - a1 p1).
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
            const int idx = 2 * b1 + b2;
            s21[idx][idx] = bulk_S(detail::half_sign(b2) * p2 - detail::half_sign(b1) * p1, mp);
        }
    return detail::max_abs_minus_identity(detail::matmul(s12, s21));
}

// Yang-Baxter residual |S12 S13 S23 - S23 S13 S12| as an explicit 8x8 product.
inline double yang_baxter_residual(double p1, double p2, double p3, const ModelParams& mp) {
    const Mat8 s12 = smatrix3(p1, p2, 0, 1, mp);
    const Mat8 s13 = smatrix3(p1, p3, 0, 2, mp);
    const Mat8 s23 = smatrix3(p2, p3, 1, 2, mp);
    const Mat8 lhs = detail::matmul(detail::matmul(s12, s13), s23);
    const Mat8 rhs = detail::matmul(detail::matmul(s23, s13), s12);
    return detail::max_abs_diff(lhs, rhs);
}

struct KernelReport {
    double bulk_unitarity = 0.0;     // |S(p)S(-p) - 1|
    double smatrix_unitarity = 0.0;  // 4x4 S12 S21 - 1
    double yang_baxter = 0.0;        // 8x8 YBE residual
    double defect_unitarity = 0.0;   // |T(p)T(-p) + R(p)R(-p) - 1|
    double defect_cross = 0.0;       // |T(p)R(-p) + R(p)T(-p)|
    double b_reflection = 0.0;       // |B_a(p)B_a(-p) - 1|

    double max() const {
        double r = bulk_unitarity;
        r = std::max(r, smatrix_unitarity);
        r = std::max(r, yang_baxter);
        r = std::max(r, defect_unitarity);
        r = std::max(r, defect_cross);
        return std::max(r, b_reflection);
    }
};

inline KernelReport verify_kernel_identities(const ModelParams& mp,
                                             std::span<const double> momenta) {
    if (momenta.empty()) throw std::invalid_argument("verify_kernel_identities: empty sample");
    KernelReport rep;
    for (std::size_t i = 0; i < momenta.size(); ++i) {
        const double p = momenta[i];
        rep.bulk_unitarity =
            std::max(rep.bulk_unitarity, std::abs(bulk_S(p, mp) * bulk_S(-p, mp) - 1.0));
        const auto [tp, rp] = defect_TR(p, mp);
        const auto [tm, rm] = defect_TR(-p, mp);
        rep.defect_unitarity = std::max(rep.defect_unitarity, std::abs(tp * tm + rp * rm - 1.0));
        rep.defect_cross = std::max(rep.defect_cross, std::abs(tp * rm + rp * tm));
        for (HalfLine a : {HalfLine::plus, HalfLine::minus}) {
            if (mp.eta == 0.0 && p == 0.0 && a == HalfLine::plus) continue;
            rep.b_reflection =
                std::max(rep.b_reflection, std::abs(b_alpha(p, a, mp) * b_alpha(-p, a, mp) - 1.0));
        }
        const double q = momenta[(i + 1) % momenta.size()];
        const double r = momenta[(i + 2) % momenta.size()];
        rep.smatrix_unitarity = std::max(rep.smatrix_unitarity, smatrix_unitarity_residual(p, q, mp));
        rep.yang_baxter = std::max(rep.yang_baxter, yang_baxter_residual(p, q, r, mp));
    }
    return rep;
}

}  // namespace nlsdefect
