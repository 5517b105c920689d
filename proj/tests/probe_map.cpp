// scratch diagnostic: full scan of readings x prescriptions against the three
// per-order boundary claims at n = 1, t = 0:
//   cont = Phi+ - Phi-,  vsum = Phi+ + Phi-,  dsum = dx Phi+ - dx Phi-  (at 0)
#include <cstdio>
#include <functional>
#include <vector>

#include "nlsdefect/kernels.hpp"

using namespace nlsdefect;

int main() {
    const double eta = 1.0;
    const cplx ie = iu * eta;
    auto mu0 = [](double k) -> cplx {
        return std::exp(-(k - 0.4) * (k - 0.4)) * cplx(0.8, 0.2) +
               std::exp(-(k + 1.1) * (k + 1.1) / 0.8) * cplx(-0.3, 0.5);
    };
    auto mu1 = [](double k) -> cplx { return 0.4 * std::exp(-0.9 * k * k) * cplx(1.0, -0.6); };
    auto Tk = [&](double p) -> cplx { return p / (p + ie); };
    auto Rk = [&](double p) -> cplx { return -ie / (p + ie); };

    using Fn = std::function<cplx(double)>;
    struct Reading {
        const char* name;
        Fn mup, mum;
    };
    std::vector<Reading> readings;
    readings.push_back({"A",
                        [&](double k) { return (mu0(k) + (k - ie) * mu1(k)) / (k - ie + 1.0); },
                        [&](double k) { return -(mu0(-k) + (k + ie) * mu1(k)) / (k + ie + 1.0); }});
    readings.push_back({"B",
                        [&](double k) { return (mu0(k) + (k - ie) * mu1(k)) / (k - ie + 1.0); },
                        [&](double k) { return (-mu0(-k) + (k + ie) * mu1(k)) / (k + ie + 1.0); }});

    const double P = 7.0;
    const int M = 801;
    const double h = 2.0 * P / (M - 1);
    std::vector<double> node(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) node[static_cast<std::size_t>(i)] = -P + i * h + 0.5 * h;
    const double eps = 4.0 * h;

    // per-pole prescription pairs: each of the two pole factors carries its
    // own regulator sign; "X" denotes the symmetrized mixed product.
    auto quantities2 = [&](const Fn& lam, int code) {
        // code: 0 = (+,+); 1 = (-,-); 2 = mixed sym C+C-; 3 = PV per pole
        cplx F = 0.0, G = 0.0;
        for (int i = 0; i < M; ++i) {
            const double p = node[static_cast<std::size_t>(i)];
            const cplx rb = std::conj(lam(p));
            if (std::abs(rb) < 1e-20) continue;
            cplx cP = 0.0, cM = 0.0, c1P = 0.0, c1M = 0.0;
            for (int j = 0; j < M; ++j) {
                const double q = node[static_cast<std::size_t>(j)];
                const cplx lq = lam(q);
                const cplx dP = cplx(p - q) - iu * eps;
                const cplx dM = cplx(p - q) + iu * eps;
                cP += h * lq / dP;
                cM += h * lq / dM;
                c1P += h * iu * q * lq / dP;
                c1M += h * iu * q * lq / dM;
            }
            const cplx cpv = 0.5 * (cP + cM), c1pv = 0.5 * (c1P + c1M);
            cplx cc, c1c;  // cc = product of two transforms, c1c = derivative pairing
            switch (code) {
                case 0: cc = cP * cP; c1c = 2.0 * c1P * cP; break;
                case 1: cc = cM * cM; c1c = 2.0 * c1M * cM; break;
                case 2: cc = cP * cM; c1c = c1P * cM + cP * c1M; break;
                default: cc = cpv * cpv; c1c = 2.0 * c1pv * cpv; break;
            }
            F += h * rb * cc;
            G += h * rb * (c1c - iu * p * cc);
        }
        return std::pair<cplx, cplx>(F, G);
    };

    const char* codename[4] = {"(+,+)", "(-,-)", "mix", "pv"};
    for (const auto& r : readings) {
        auto lp = [&](double p) -> cplx {
            return r.mup(p) + Tk(p) * r.mum(p) + Rk(p) * r.mup(-p);
        };
        auto lm = [&](double p) -> cplx {
            return Tk(-p) * r.mup(p) + r.mum(p) + Rk(-p) * r.mum(-p);
        };
        for (int cp = 0; cp < 4; ++cp) {
            auto [Fp, Gp] = quantities2(lp, cp);
            for (int cm = 0; cm < 4; ++cm) {
                auto [Fm, Gm] = quantities2(lm, cm);
                const cplx cont = Fp - Fm;
                const cplx jump = (Gp - Gm) - eta * (Fp + Fm);
                std::printf("reading %s  +:%-6s -:%-6s |cont|=%9.3e  |jump|=%9.3e\n", r.name,
                            codename[cp], codename[cm], std::abs(cont), std::abs(jump));
            }
        }
        std::printf("\n");
    }
    return 0;
}
