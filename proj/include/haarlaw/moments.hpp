/*
 * moments.hpp — moments and cumulants of A(psi) by independent routes.
 *
 *   compact      m_n = C(n+d-1, n)^{-1} sum_k a_k^{n+d-1} / prod_{j!=k}(a_k - a_j)
 *                (non-degenerate spectra; MPFR with condition-driven precision,
 *                the terms can overflow double and cancel by hundreds of digits)
 *   permutation  m_n = ((d-1)!/(d+n-1)!) sum_{pi in S_n} prod_{cycles} p_|c|
 *                (literal n! enumeration, n <= 6; works degenerate; the oracle)
 *   fidelity     m_n = n!(d-1)!/(d+n-1)! for the rank-1 projector
 *   quadrature   integral x^n P(x) dx from the exact law
 *
 * Cumulants kappa_1..3 from the standard moment relations.
 */

#pragma once

#include "haarlaw/eft.hpp"
#include "haarlaw/errors.hpp"
#include "haarlaw/mpreal.hpp"
#include "haarlaw/quadrature.hpp"
#include "haarlaw/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace haarlaw {

enum class MomentMethod { Compact, Permutation, Fidelity, Quadrature };

inline const char* to_string(MomentMethod m) {
    switch (m) {
        case MomentMethod::Compact: return "compact";
        case MomentMethod::Permutation: return "permutation";
        case MomentMethod::Fidelity: return "fidelity";
        case MomentMethod::Quadrature: return "quadrature";
    }
    return "?";
}

struct MomentReport {
    int n_max = 0;
    std::vector<double> m; // m[0] = m_1, ..., m[n_max-1] = m_{n_max}
    MomentMethod method = MomentMethod::Permutation;
    std::array<double, 3> kappa{0.0, 0.0, 0.0}; // filled when m_1..m_3 known

    double moment(int n) const {
        if (n < 1 || n > n_max) throw InvalidArgument("MomentReport: moment index");
        return m[n - 1];
    }
};

// kappa_1 = m_1, kappa_2 = m_2 - m_1^2, kappa_3 = m_3 - 3 m_1 m_2 + 2 m_1^3,
// combined in double-double; tiny negative kappa_2 from roundoff clamps to 0.
inline MomentReport cumulants(MomentReport report) {
    if (report.n_max < 3)
        throw InvalidArgument("cumulants: need moments m_1..m_3");
    const DD m1(report.m[0]), m2(report.m[1]), m3(report.m[2]);
    report.kappa[0] = report.m[0];
    const DD m1sq = dd_mul(m1, m1);
    DD k2 = dd_sub(m2, m1sq);
    DD k3 = dd_sub(m3, dd_mul(dd_mul(m1, m2), 3.0));
    k3 = dd_add(k3, dd_mul(dd_mul(m1sq, m1), 2.0));
    double k2d = k2.to_double();
    if (k2d < 0.0 && k2d > -1e-12 * std::max(1.0, m1sq.hi)) k2d = 0.0;
    report.kappa[1] = k2d;
    report.kappa[2] = k3.to_double();
    return report;
}

namespace detail {

// condition-driven MPFR evaluation of the compact formula
inline std::vector<double> compact_moments_mp(const Spectrum& s, int n_max,
                                              std::array<double, 3>* kappa_out) {
    const auto& vals = s.values();
    const int d = s.dimension();
    mpfr_prec_t prec = 320;
    for (;;) {
        bool ok = true;
        std::vector<MpReal> m;
        m.reserve(n_max);
        for (int n = 1; n <= n_max && ok; ++n) {
            MpReal sum(0.0, prec), sumabs(0.0, prec);
            for (int k = 0; k < d; ++k) {
                MpReal term = MpReal(vals[k], prec).pow_si(n + d - 1);
                for (int j = 0; j < d; ++j)
                    if (j != k) term /= MpReal(vals[k], prec) - MpReal(vals[j], prec);
                sum += term;
                sumabs += term.abs();
            }
            if (!sum.is_zero() && !sumabs.is_zero() &&
                sumabs.exp2() - sum.exp2() > static_cast<long>(prec) - 120) {
                ok = false;
                break;
            }
            sum /= MpReal::binomial(n + d - 1, n, prec);
            m.push_back(std::move(sum));
        }
        if (ok) {
            std::vector<double> out;
            out.reserve(n_max);
            for (const auto& x : m) out.push_back(x.to_double());
            if (kappa_out && n_max >= 3) {
                MpReal k2 = m[1] - m[0] * m[0];
                MpReal k3 = m[2] - MpReal(3.0, prec) * m[0] * m[1] +
                            MpReal(2.0, prec) * m[0] * m[0] * m[0];
                (*kappa_out)[0] = out[0];
                (*kappa_out)[1] = k2.to_double();
                (*kappa_out)[2] = k3.to_double();
            }
            return out;
        }
        if (prec >= detail::kMaxEscalationBits)
            throw PrecisionExceeded("moments_compact: cancellation beyond precision cap");
        prec *= 2;
    }
}

} // namespace detail

// compact spectral-sum route; throws RequiresNonDegenerate on degenerate input.
inline MomentReport moments_compact(const Spectrum& s, int n_max) {
    if (n_max < 1) throw InvalidArgument("moments_compact: n_max must be >= 1");
    if (s.is_degenerate())
        throw RequiresNonDegenerate("moments_compact: degenerate spectrum; use the "
                                    "permutation or quadrature route");
    MomentReport r;
    r.n_max = n_max;
    r.method = MomentMethod::Compact;
    if (s.dimension() == 1) { // single eigenvalue, point mass
        r.m.resize(n_max);
        for (int n = 1; n <= n_max; ++n) r.m[n - 1] = std::pow(s.values()[0], n);
        if (n_max >= 3) r = cumulants(std::move(r));
        return r;
    }
    std::array<double, 3> kap{};
    r.m = detail::compact_moments_mp(s, n_max, n_max >= 3 ? &kap : nullptr);
    if (n_max >= 3) {
        r.kappa = kap;
        if (r.kappa[1] < 0.0 && r.kappa[1] > -1e-12) r.kappa[1] = 0.0;
    }
    return r;
}

// literal S_n enumeration of the permutation-trace formula via cycle
// lengths and power sums; the
// independent oracle.  n_max <= 6 (|S_6| = 720).
inline MomentReport moments_permutation(const Spectrum& s, int n_max) {
    if (n_max < 1) throw InvalidArgument("moments_permutation: n_max must be >= 1");
    if (n_max > 6) throw TooLarge("moments_permutation: n_max capped at 6");
    const int d = s.dimension();
    MomentReport r;
    r.n_max = n_max;
    r.method = MomentMethod::Permutation;
    r.m.resize(n_max);
    // power sums p_r = sum_j n_j a_j^r, r <= 6
    std::vector<DD> psum(n_max + 1, DD(0.0));
    for (size_t j = 0; j < s.values().size(); ++j) {
        DD ar(static_cast<double>(s.multiplicities()[j]));
        for (int rr = 1; rr <= n_max; ++rr) {
            ar = dd_mul(ar, DD(s.values()[j]));
            psum[rr] = dd_add(psum[rr], ar);
        }
    }
    for (int n = 1; n <= n_max; ++n) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        DD total(0.0);
        do {
            // product of p_{cycle length} over the cycles of perm
            DD prod(1.0);
            std::vector<bool> seen(n, false);
            for (int i = 0; i < n; ++i) {
                if (seen[i]) continue;
                int len = 0, j = i;
                while (!seen[j]) {
                    seen[j] = true;
                    j = perm[j];
                    ++len;
                }
                prod = dd_mul(prod, psum[len]);
            }
            total = dd_add(total, prod);
        } while (std::next_permutation(perm.begin(), perm.end()));
        // (d-1)!/(d+n-1)! = 1/(d(d+1)...(d+n-1))
        for (int i = 0; i < n; ++i) total = dd_mul(total, 1.0 / static_cast<double>(d + i));
        r.m[n - 1] = total.to_double();
    }
    if (n_max >= 3) r = cumulants(std::move(r));
    return r;
}

// Von Neumann fidelity moments for the rank-1 projector:
// m_n = n!(d-1)!/(d+n-1)! = prod_{i=1..n} i/(d+i-1); m_1 = 1/d exactly.
inline MomentReport moments_fidelity(int d, int n_max) {
    if (d < 1) throw InvalidArgument("moments_fidelity: d must be >= 1");
    if (n_max < 1) throw InvalidArgument("moments_fidelity: n_max must be >= 1");
    MomentReport r;
    r.n_max = n_max;
    r.method = MomentMethod::Fidelity;
    r.m.resize(n_max);
    DD acc(1.0);
    for (int i = 1; i <= n_max; ++i) {
        acc = dd_mul(acc, DD(static_cast<double>(i)));
        acc = dd_div(acc, DD(static_cast<double>(d + i - 1)));
        r.m[i - 1] = i == 1 ? 1.0 / d : acc.to_double();
    }
    if (n_max >= 3) r = cumulants(std::move(r));
    return r;
}

// log m_n = ln n! + ln (d-1)! - ln (d+n-1)!, for the exact-in-log-space checks
inline double fidelity_log_moment(int d, int n) {
    return dd_sub(dd_add(dd_ln_factorial(n), dd_ln_factorial(d - 1)),
                  dd_ln_factorial(d + n - 1))
        .to_double();
}

// moments from Gauss-Legendre quadrature of the compiled density
inline MomentReport moments_quadrature(const ExactLaw& law, int n_max) {
    if (n_max < 1) throw InvalidArgument("moments_quadrature: n_max must be >= 1");
    MomentReport r;
    r.n_max = n_max;
    r.method = MomentMethod::Quadrature;
    r.m.resize(n_max);
    for (int n = 1; n <= n_max; ++n) r.m[n - 1] = law_moment_quadrature(law, n);
    if (n_max >= 3) r = cumulants(std::move(r));
    return r;
}

// E[<psi|A|psi><psi|B|psi>] = (trA trB + tr(AB)) / (d(d+1)); the n = 2
// permutation average for two (commuting) observables, used for the
// covariance-decoupling check.
inline double mixed_second_moment(double trace_a, double trace_b, double trace_ab, int d) {
    if (d < 1) throw InvalidArgument("mixed_second_moment: d must be >= 1");
    return (trace_a * trace_b + trace_ab) /
           (static_cast<double>(d) * (static_cast<double>(d) + 1.0));
}

} // namespace haarlaw
