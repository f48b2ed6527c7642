/*
 * law.hpp — the exact law of A(psi) = <psi|A|psi> over Haar-random pure states.
 *
 * For a spectrum with l distinct eigenvalues a_k of multiplicities n_k
 * (sum n_k = d >= 2 distinct values), the density is the higher-order-residue
 * partial fraction expansion
 *
 *   P(x) = sum_k sum_{M=0}^{n_k-1} c_{k,M} (a_k - x)^p sign(a_k - x),
 *   p = d + M - n_k - 1,
 *   c_{k,M} = (-1)^M (d-1)! / (2 p! (n_k-1-M)!) *
 *             sum_{compositions sum_{j!=k} m_j = M}
 *               prod_{j!=k} C(n_j+m_j-1, m_j) / (a_k - a_j)^{n_j+m_j},
 *
 * which collapses to c_k = (d-1) / (2 prod_{j!=k}(a_k - a_j)) with p = d-2 in
 * the non-degenerate case.  CDF/survival come from term-wise antiderivatives
 * with the constant pinned at a_1 (resp. a_l); the characteristic and moment
 * generating functions reuse the same coefficients,
 *
 *   chi(lambda) = sum_{k,M} c_{k,M} * 2 p! * e^{i lambda a_k} / (i lambda)^{p+1},
 *
 * with a centered moment series below the Taylor switch radius where the
 * closed form is 0/0.  A single-eigenvalue spectrum compiles to a point mass.
 *
 * All sums are alternating with terms up to ~(d-1)!/gap^{d-1}; evaluation runs
 * through the precision ladder in precision.hpp, with coefficients kept as
 * (sign, log-magnitude) pairs for the double modes and re-materialized in MPFR
 * for the high-precision rungs.
 */

#pragma once

#include "haarlaw/eft.hpp"
#include "haarlaw/errors.hpp"
#include "haarlaw/mpreal.hpp"
#include "haarlaw/precision.hpp"
#include "haarlaw/spectrum.hpp"

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

namespace haarlaw {

struct PointMassLaw {
    double location = 0.0;
};

namespace detail {

inline int sgn(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// s^e for s in {-1,0,1}
inline int sgn_pow(int s, long e) {
    if (s == 0) return 0;
    return (s < 0 && (e & 1L)) ? -1 : 1;
}

struct LawTerm {
    int k = 0;          // distinct eigenvalue index
    int order = 0;      // derivative order M_k
    long power = 0;     // p = d + M - n_k - 1
    int sign = 0;       // sign of c_{k,M}; 0 means the coefficient vanished
    DD log_abs;         // ln|c_{k,M}|
    int cancel_bits = 0; // cancellation inside the composition sum, in bits
};

// next composition of `total` into m.size() parts, fixed deterministic order;
// m must be seeded by first_composition. Returns false after the last one.
inline void first_composition(std::vector<int>& m, int total) {
    std::fill(m.begin(), m.end(), 0);
    if (!m.empty()) m.back() = total;
}
inline bool next_composition(std::vector<int>& m, int total) {
    const size_t n = m.size();
    if (n <= 1) return false;
    // find rightmost position (excluding last) that can be incremented
    int tail = m[n - 1];
    for (size_t i = n - 1; i-- > 0;) {
        if (tail > 0) {
            ++m[i];
            --tail;
            for (size_t j = i + 1; j + 1 < n; ++j) {
                tail += m[j];
                m[j] = 0;
            }
            m[n - 1] = tail;
            return true;
        }
        tail += m[i];
        m[i] = 0;
    }
    (void)total;
    return false;
}

} // namespace detail

// Compiled coefficient table for a non-constant spectrum.  Immutable after
// construction; the MPFR tables and centered-moment series are lazy caches
// guarded by mutexes, so concurrent evaluation is safe.
class LawCoefficients {
  public:
    explicit LawCoefficients(Spectrum s) : spec_(std::move(s)) {
        if (spec_.distinct_count() < 2)
            throw InvalidArgument("LawCoefficients: constant spectrum is a point mass");
        compile();
    }

    const Spectrum& spectrum() const { return spec_; }
    const std::vector<detail::LawTerm>& terms() const { return terms_; }
    double center() const { return 0.5 * (spec_.min() + spec_.max()); }

    // coefficients c_{k,M} accurate to ~2^-(bits+20), aligned with terms()
    std::shared_ptr<const std::vector<MpReal>> mp_coefficients(mpfr_prec_t bits) const {
        std::lock_guard<std::mutex> lock(mp_mutex_);
        auto it = mp_cache_.find(bits);
        if (it != mp_cache_.end()) return it->second;
        auto table = std::make_shared<std::vector<MpReal>>();
        table->reserve(terms_.size());
        for (const auto& t : terms_)
            table->push_back(coefficient_mp(t, bits + t.cancel_bits + 64, bits + 32));
        mp_cache_.emplace(bits, table);
        return table;
    }

    // central moments mu_0..mu_n of the law about center(), for the series
    // branch of chi/M: the permutation-trace formula resummed through the
    // power-sum recurrence h_n = (1/n) sum_r p_r h_{n-r}, mu_n = h_n/C(d+n-1,n)
    std::vector<DD> central_moments(int upto) const {
        std::lock_guard<std::mutex> lock(series_mutex_);
        if (static_cast<int>(central_.size()) > upto)
            return std::vector<DD>(central_.begin(), central_.begin() + upto + 1);
        const double c = center();
        const int d = spec_.dimension();
        const auto& vals = spec_.values();
        const auto& mult = spec_.multiplicities();
        // power sums of the centered eigenvalue multiset
        std::vector<DD> p(upto + 1, DD(0.0));
        for (size_t j = 0; j < vals.size(); ++j) {
            const DD a = DD::from_sum(vals[j], -c);
            DD ar(static_cast<double>(mult[j]));
            for (int r = 1; r <= upto; ++r) {
                ar = dd_mul(ar, a);
                p[r] = dd_add(p[r], ar);
            }
        }
        std::vector<DD> h(upto + 1, DD(0.0));
        h[0] = DD(1.0);
        for (int n = 1; n <= upto; ++n) {
            DD acc(0.0);
            for (int r = 1; r <= n; ++r) acc = dd_add(acc, dd_mul(p[r], h[n - r]));
            h[n] = dd_mul(acc, 1.0 / n);
        }
        std::vector<DD> mu(upto + 1);
        DD binom(1.0); // C(d+n-1, n), exact integer factors
        for (int n = 0; n <= upto; ++n) {
            if (n > 0)
                binom = dd_div(dd_mul(binom, DD(static_cast<double>(d - 1 + n))),
                               DD(static_cast<double>(n)));
            mu[n] = dd_div(h[n], binom);
        }
        central_ = mu;
        return mu;
    }

  private:
    void compile() {
        const int l = spec_.distinct_count();
        const int d = spec_.dimension();
        const auto& mult = spec_.multiplicities();
        for (int k = 0; k < l; ++k) {
            for (int M = 0; M < mult[k]; ++M) {
                detail::LawTerm t;
                t.k = k;
                t.order = M;
                t.power = static_cast<long>(d) + M - mult[k] - 1;
                mpfr_prec_t prec = 384;
                for (;;) {
                    auto [sum, cancel] = composition_sum(k, M, prec);
                    if (sum.is_zero() && prec < 2048) {
                        prec *= 2;
                        continue;
                    }
                    if (!sum.is_zero() && cancel > static_cast<int>(prec) - 130 &&
                        prec < detail::kMaxEscalationBits) {
                        prec *= 2;
                        continue;
                    }
                    if (sum.is_zero()) {
                        t.sign = 0;
                        break;
                    }
                    t.cancel_bits = cancel;
                    // ln|c| = ln (d-1)! - ln 2 - ln p! - ln (n_k-1-M)! + ln|sum|
                    MpReal logc = MpReal::factorial(d - 1, prec).log();
                    logc -= MpReal(2.0, prec).log();
                    logc -= MpReal::factorial(t.power, prec).log();
                    logc -= MpReal::factorial(mult[k] - 1 - M, prec).log();
                    logc += sum.abs().log();
                    const double hi = logc.to_double();
                    MpReal rem = logc - MpReal(hi, prec);
                    t.log_abs = DD(hi, rem.to_double());
                    t.sign = ((M & 1) ? -1 : 1) * sum.sign();
                    break;
                }
                terms_.push_back(t);
            }
        }
    }

    // sum over compositions {m_j}_{j != k} of M of
    //   prod_j C(n_j+m_j-1, m_j) / (a_k - a_j)^{n_j+m_j};
    // returns the sum and the cancellation (bits lost) inside it
    std::pair<MpReal, int> composition_sum(int k, int M, mpfr_prec_t prec) const {
        const auto& vals = spec_.values();
        const auto& mult = spec_.multiplicities();
        const int l = spec_.distinct_count();
        std::vector<int> others;
        for (int j = 0; j < l; ++j)
            if (j != k) others.push_back(j);
        std::vector<MpReal> diffs;
        diffs.reserve(others.size());
        for (int j : others) diffs.emplace_back(MpReal(vals[k], prec) - MpReal(vals[j], prec));

        MpReal sum(0.0, prec), sumabs(0.0, prec);
        std::vector<int> m(others.size());
        detail::first_composition(m, M);
        do {
            MpReal prod(1.0, prec);
            for (size_t i = 0; i < others.size(); ++i) {
                const int nj = mult[others[i]];
                if (m[i] > 0)
                    prod *= MpReal::binomial(nj + m[i] - 1, m[i], prec);
                prod /= diffs[i].pow_si(nj + m[i]);
            }
            sum += prod;
            sumabs += prod.abs();
        } while (detail::next_composition(m, M));

        int cancel = 0;
        if (!sum.is_zero() && !sumabs.is_zero())
            cancel = static_cast<int>(std::max<long>(0, sumabs.exp2() - sum.exp2()));
        return {std::move(sum), cancel};
    }

    MpReal coefficient_mp(const detail::LawTerm& t, mpfr_prec_t work, mpfr_prec_t out) const {
        MpReal r(out);
        if (t.sign == 0) return r;
        auto [sum, cancel] = composition_sum(t.k, t.order, work);
        (void)cancel;
        MpReal c = MpReal::factorial(spec_.dimension() - 1, work);
        c /= MpReal(2.0, work);
        c /= MpReal::factorial(t.power, work);
        c /= MpReal::factorial(spec_.multiplicities()[t.k] - 1 - t.order, work);
        c *= sum;
        if (t.order & 1) c = -c;
        mpfr_set(r.raw(), c.raw(), MPFR_RNDN);
        return r;
    }

    Spectrum spec_;
    std::vector<detail::LawTerm> terms_;
    mutable std::mutex mp_mutex_;
    mutable std::map<mpfr_prec_t, std::shared_ptr<const std::vector<MpReal>>> mp_cache_;
    mutable std::mutex series_mutex_;
    mutable std::vector<DD> central_;
};

// A compiled law: either a point mass (single distinct eigenvalue) or a
// coefficient table, plus the precision policy evaluations run under.
class ExactLaw {
  public:
    ExactLaw(Spectrum s, PointMassLaw pm, PrecisionPolicy pol)
        : spec_(std::move(s)), body_(pm), policy_(pol) {}
    ExactLaw(Spectrum s, std::shared_ptr<const LawCoefficients> lc, PrecisionPolicy pol)
        : spec_(std::move(s)), body_(std::move(lc)), policy_(pol) {}

    bool is_point_mass() const { return std::holds_alternative<PointMassLaw>(body_); }
    const PointMassLaw& point_mass() const { return std::get<PointMassLaw>(body_); }
    const LawCoefficients& coefficients() const {
        return *std::get<std::shared_ptr<const LawCoefficients>>(body_);
    }
    const Spectrum& spectrum() const { return spec_; }

    const PrecisionPolicy& policy() const { return policy_; }
    ExactLaw with_policy(PrecisionPolicy pol) const {
        ExactLaw copy = *this;
        copy.policy_ = pol;
        return copy;
    }

  private:
    Spectrum spec_;
    std::variant<PointMassLaw, std::shared_ptr<const LawCoefficients>> body_;
    PrecisionPolicy policy_;
};

inline ExactLaw compile_law(const Spectrum& s,
                            PrecisionPolicy policy = PrecisionPolicy::automatic()) {
    policy.validate();
    if (s.distinct_count() == 1) return ExactLaw(s, PointMassLaw{s.values()[0]}, policy);
    return ExactLaw(s, std::make_shared<const LawCoefficients>(s), policy);
}

namespace detail {

// outcome of one summation kernel run; log2 quantities are in true units
struct Summed {
    double value = 0.0;
    double log2_abs_value = -std::numeric_limits<double>::infinity();
    double log2_abs_err = -std::numeric_limits<double>::infinity();
};

// the returned double is bit-exact below this absolute-log2 error
inline constexpr double kExactAsDoubleLog2 = -1114.0;

// An escalating policy climbs until the relative target is met (or the value
// is exact as a double).  A pinned policy additionally accepts best-effort
// results whose absolute error is negligible at the operation's natural scale
// (abs_scale); beyond that it refuses rather than return garbage.
inline bool accepted(const Summed& r, const PrecisionPolicy& pol, double abs_scale) {
    if (r.log2_abs_err <= kExactAsDoubleLog2) return true;
    const double lg_target = std::log2(pol.target_rel_error);
    if (r.log2_abs_err <= r.log2_abs_value + lg_target) return true;
    if (!pol.escalate && abs_scale > 0.0)
        return r.log2_abs_err <= std::log2(abs_scale) + lg_target;
    return false;
}

// entries are (sign, ln|term|); value = sum sign*e^{ln term}
inline Summed sum_signed_logs_fast(const std::vector<std::pair<int, double>>& entries,
                                   double extra_log_err_per_term) {
    Summed out;
    double maxlog = -std::numeric_limits<double>::infinity();
    for (const auto& [s, L] : entries)
        if (s != 0 && L > maxlog) maxlog = L;
    if (!std::isfinite(maxlog)) return out; // all zero
    NeumaierSum sum, sumabs;
    for (const auto& [s, L] : entries) {
        if (s == 0) continue;
        const double t = std::exp(L - maxlog);
        sum.add(s > 0 ? t : -t);
        sumabs.add(t);
    }
    const double v = sum.value();
    const double u = (16.0 + std::abs(maxlog) + extra_log_err_per_term) * 0x1p-53;
    out.log2_abs_err = (maxlog + std::log(sumabs.value() * u + 1e-300)) / M_LN2;
    if (v != 0.0) {
        out.log2_abs_value = (maxlog + std::log(std::abs(v))) / M_LN2;
        if (out.log2_abs_value < 1024.0) out.value = v * std::exp(maxlog);
    }
    return out;
}

inline Summed sum_signed_logs_comp(const std::vector<std::pair<int, DD>>& entries,
                                   double extra_log_err_per_term) {
    Summed out;
    double maxlog = -std::numeric_limits<double>::infinity();
    for (const auto& [s, L] : entries)
        if (s != 0 && L.hi > maxlog) maxlog = L.hi;
    if (!std::isfinite(maxlog)) return out;
    DD sum(0.0);
    NeumaierSum sumabs;
    for (const auto& [s, L] : entries) {
        if (s == 0) continue;
        DD t = dd_exp(dd_sub(L, DD(maxlog)));
        sumabs.add(t.hi);
        sum = dd_add(sum, s > 0 ? t : dd_neg(t));
    }
    const double v = sum.to_double();
    const double u = (16.0 + std::abs(maxlog) + extra_log_err_per_term) * 0x1p-101;
    out.log2_abs_err = (maxlog + std::log(sumabs.value() * u + 1e-300)) / M_LN2;
    if (v != 0.0) {
        out.log2_abs_value = (maxlog + std::log(std::abs(v))) / M_LN2;
        if (out.log2_abs_value < 1024.0)
            out.value = dd_mul(sum, dd_exp(DD(maxlog))).to_double();
    }
    return out;
}

inline Summed finish_mp(const MpReal& sum, const MpReal& sumabs, mpfr_prec_t bits) {
    Summed out;
    if (!sumabs.is_zero())
        out.log2_abs_err = static_cast<double>(sumabs.exp2()) -
                           static_cast<double>(bits) + 8.0;
    if (!sum.is_zero()) {
        out.log2_abs_value = static_cast<double>(sum.exp2());
        out.value = sum.to_double();
    }
    return out;
}

enum class TailSide { Cdf, Survival };

// density / cdf / survival kernels ----------------------------------------

// boundary_limit: 0 for plain sign(0) := 0 at eigenvalue points; -1/+1 when x
// sits on the left/right support edge, where the density takes its one-sided
// interior limit (only p = 0 terms of the edge cluster survive there; see the
// rank-1 projector, whose beta density is d-1 at x = 0).
inline Summed density_kernel(const LawCoefficients& lc, double x, int boundary_limit,
                             EvalMode mode) {
    const auto& vals = lc.spectrum().values();
    const auto& terms = lc.terms();
    auto term_sign0 = [&](const detail::LawTerm& t, int s0) -> int {
        if (s0 != 0) return sgn_pow(s0, t.power + 1);
        if (boundary_limit != 0 && t.power == 0) return boundary_limit;
        return 0; // 0^p kills p >= 1; sign(0) := 0 kills p = 0 off the edges
    };
    if (mode.mode == PrecisionMode::HighPrecision) {
        const mpfr_prec_t B = mode.bits;
        auto coeffs = lc.mp_coefficients(B);
        MpReal sum(0.0, B + 32), sumabs(0.0, B + 32), x_mp(x, B + 32);
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            if (t.sign == 0) continue;
            const int s0 = sgn(vals[t.k] - x);
            MpReal term(0.0, B + 32);
            if (s0 != 0) {
                MpReal diff = MpReal(vals[t.k], B + 32) - x_mp;
                term = (*coeffs)[i] * diff.pow_si(t.power);
                if (s0 < 0) term = -term;
            } else if (boundary_limit != 0 && t.power == 0) {
                term = (*coeffs)[i];
                if (boundary_limit < 0) term = -term;
            } else {
                continue;
            }
            sum += term;
            sumabs += term.abs();
        }
        return finish_mp(sum, sumabs, B);
    }
    double maxp = 0.0, maxL = 0.0;
    if (mode.mode == PrecisionMode::FastFloat) {
        std::vector<std::pair<int, double>> es;
        es.reserve(terms.size());
        for (const auto& t : terms) {
            if (t.sign == 0) continue;
            const double diff = vals[t.k] - x;
            const int s0 = sgn(diff);
            const int sg = term_sign0(t, s0);
            if (sg == 0) continue;
            const double L =
                s0 == 0 ? t.log_abs.hi
                        : t.log_abs.hi + t.power * std::log(std::abs(diff));
            es.emplace_back(t.sign * sg, L);
            maxp = std::max(maxp, static_cast<double>(t.power));
            maxL = std::max(maxL, std::abs(L));
        }
        return sum_signed_logs_fast(es, maxp + maxL);
    }
    std::vector<std::pair<int, DD>> es;
    es.reserve(terms.size());
    for (const auto& t : terms) {
        if (t.sign == 0) continue;
        const DD diff = DD::from_sum(vals[t.k], -x);
        const int s0 = sgn(diff.hi != 0.0 ? diff.hi : diff.lo);
        const int sg = term_sign0(t, s0);
        if (sg == 0) continue;
        DD L = s0 == 0 ? t.log_abs
                       : dd_add(t.log_abs,
                                dd_mul(dd_log(dd_abs(diff)), static_cast<double>(t.power)));
        es.emplace_back(t.sign * sg, L);
        maxp = std::max(maxp, static_cast<double>(t.power));
        maxL = std::max(maxL, std::abs(L.hi));
    }
    return sum_signed_logs_comp(es, maxp + maxL);
}

// antiderivative entries: G(y) = -sgn_pow(s_y, p+2) |a_k-y|^{p+1} / (p+1)
// cdf(x) = sum c [G(x) - G(a_1)],  survival(x) = sum c [G(a_l) - G(x)]
inline Summed tail_kernel(const LawCoefficients& lc, double x, TailSide side, EvalMode mode) {
    const auto& vals = lc.spectrum().values();
    const auto& terms = lc.terms();
    const double anchor = side == TailSide::Cdf ? vals.front() : vals.back();
    if (mode.mode == PrecisionMode::HighPrecision) {
        const mpfr_prec_t B = mode.bits;
        auto coeffs = lc.mp_coefficients(B);
        MpReal sum(0.0, B + 32), sumabs(0.0, B + 32);
        auto G = [&](const detail::LawTerm& t, double y) {
            MpReal diff = MpReal(vals[t.k], B + 32) - MpReal(y, B + 32);
            MpReal g = diff.pow_si(t.power + 1);
            g /= static_cast<long>(t.power + 1);
            const int s0 = sgn(vals[t.k] - y);
            if (s0 > 0) g = -g; // -sign(a_k-y)*(a_k-y)^{p+1}/(p+1), sign folded via |.|
            // for s0 < 0: -s0*(...)^{p+1} = +(...)^{p+1} with (a_k-y) negative kept signed
            if (s0 == 0) mpfr_set_zero(g.raw(), 1);
            return g;
        };
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            if (t.sign == 0) continue;
            MpReal ga = side == TailSide::Cdf ? G(t, x) : G(t, anchor);
            MpReal gb = side == TailSide::Cdf ? G(t, anchor) : G(t, x);
            MpReal term = (*coeffs)[i] * (ga - gb);
            sum += term;
            sumabs += ((*coeffs)[i] * ga).abs() + ((*coeffs)[i] * gb).abs();
        }
        return finish_mp(sum, sumabs, B);
    }
    // log-space modes: two entries per term (at x and at the anchor)
    auto entry_sign = [](const detail::LawTerm& t, int s_y) {
        return -t.sign * sgn_pow(s_y, t.power + 2);
    };
    double maxp = 0.0, maxL = 0.0;
    if (mode.mode == PrecisionMode::FastFloat) {
        std::vector<std::pair<int, double>> es;
        es.reserve(2 * terms.size());
        for (const auto& t : terms) {
            if (t.sign == 0) continue;
            const double lp1 = std::log(static_cast<double>(t.power + 1));
            for (int which = 0; which < 2; ++which) {
                const double y = which == 0 ? x : anchor;
                const double diff = vals[t.k] - y;
                const int s0 = sgn(diff);
                if (s0 == 0) continue;
                const double L = t.log_abs.hi + (t.power + 1) * std::log(std::abs(diff)) - lp1;
                int sg = entry_sign(t, s0);
                // G(x) enters with +, G(anchor) with -; survival flips both
                if (which == 1) sg = -sg;
                if (side == TailSide::Survival) sg = -sg;
                es.emplace_back(sg, L);
                maxp = std::max(maxp, static_cast<double>(t.power + 1));
                maxL = std::max(maxL, std::abs(L));
            }
        }
        return sum_signed_logs_fast(es, maxp + maxL);
    }
    std::vector<std::pair<int, DD>> es;
    es.reserve(2 * terms.size());
    for (const auto& t : terms) {
        if (t.sign == 0) continue;
        const DD lp1 = dd_log(static_cast<double>(t.power + 1));
        for (int which = 0; which < 2; ++which) {
            const double y = which == 0 ? x : anchor;
            const DD diff = DD::from_sum(vals[t.k], -y);
            const int s0 = sgn(diff.hi != 0.0 ? diff.hi : diff.lo);
            if (s0 == 0) continue;
            DD L = dd_add(t.log_abs,
                          dd_mul(dd_log(dd_abs(diff)), static_cast<double>(t.power + 1)));
            L = dd_sub(L, lp1);
            int sg = entry_sign(t, s0);
            if (which == 1) sg = -sg;
            if (side == TailSide::Survival) sg = -sg;
            es.emplace_back(sg, L);
            maxp = std::max(maxp, static_cast<double>(t.power + 1));
            maxL = std::max(maxL, std::abs(L.hi));
        }
    }
    return sum_signed_logs_comp(es, maxp + maxL);
}

template <typename Kernel>
inline double run_ladder(const PrecisionPolicy& pol, const char* what, double abs_scale,
                         Kernel&& kernel) {
    const auto rungs = escalation_ladder(pol);
    for (const auto& rung : rungs) {
        Summed r = kernel(rung);
        if (accepted(r, pol, abs_scale)) {
            if (r.log2_abs_value >= 1024.0)
                throw PrecisionExceeded(std::string(what) + ": result overflows double");
            return r.value;
        }
    }
    throw PrecisionExceeded(std::string(what) +
                            ": cancellation exceeds the precision policy");
}

} // namespace detail

// P(x); exactly 0 outside [a_1, a_l], sign(0) := 0 at interior eigenvalues,
// one-sided interior limit on the support edges.
inline double density(const ExactLaw& law, double x) {
    if (law.is_point_mass())
        throw NoDensity("density: point-mass law has no density function");
    const auto& lc = law.coefficients();
    const auto& s = lc.spectrum();
    if (x < s.min() || x > s.max()) return 0.0;
    const int blim = x == s.min() ? -1 : (x == s.max() ? 1 : 0);
    // natural density scale: the peak is at least 1/range
    double v = detail::run_ladder(law.policy(), "density", 1.0 / s.range(),
                                  [&](detail::EvalMode m) {
        return detail::density_kernel(lc, x, blim, m);
    });
    return v < 0.0 ? 0.0 : v; // roundoff clamp; the estimate bounds the excursion
}

// The raw alternating sum without the support clamp, evaluated on the policy's
// first rung with no escalation; diagnostic for the outside-support vanishing.
inline double density_unclamped(const ExactLaw& law, double x) {
    if (law.is_point_mass())
        throw NoDensity("density: point-mass law has no density function");
    const auto rungs = detail::escalation_ladder(law.policy());
    return detail::density_kernel(law.coefficients(), x, 0, rungs.front()).value;
}

inline double cdf(const ExactLaw& law, double x) {
    if (law.is_point_mass()) return x < law.point_mass().location ? 0.0 : 1.0;
    const auto& lc = law.coefficients();
    const auto& s = lc.spectrum();
    if (x <= s.min()) return 0.0;
    if (x >= s.max()) return 1.0;
    double v = detail::run_ladder(law.policy(), "cdf", 1.0, [&](detail::EvalMode m) {
        return detail::tail_kernel(lc, x, detail::TailSide::Cdf, m);
    });
    return std::clamp(v, 0.0, 1.0);
}

// 1 - cdf(x), anchored at a_l so deep right tails keep relative accuracy
inline double survival(const ExactLaw& law, double x) {
    if (law.is_point_mass()) return x < law.point_mass().location ? 1.0 : 0.0;
    const auto& lc = law.coefficients();
    const auto& s = lc.spectrum();
    if (x <= s.min()) return 1.0;
    if (x >= s.max()) return 0.0;
    double v = detail::run_ladder(law.policy(), "survival", 1.0,
                                  [&](detail::EvalMode m) {
        return detail::tail_kernel(lc, x, detail::TailSide::Survival, m);
    });
    return std::clamp(v, 0.0, 1.0);
}

namespace detail {

struct ComplexSummed {
    double re = 0.0, im = 0.0;
    double log2_abs_value = -std::numeric_limits<double>::infinity();
    double log2_abs_err = -std::numeric_limits<double>::infinity();
};

// multiply (re, im) by (-i*sgn)^r, r in [0,3]
inline void rotate_quarter(double& re, double& im, long r, int sgn_lambda) {
    r &= 3;
    if (sgn_lambda < 0 && (r & 1)) r = 4 - r; // (+i)^r = (-i)^{4-r}
    double nr = re, ni = im;
    switch (r) {
        case 1: nr = im;  ni = -re; break;
        case 2: nr = -re; ni = -im; break;
        case 3: nr = -im; ni = re;  break;
        default: break;
    }
    re = nr;
    im = ni;
}

inline void rotate_quarter(DD& re, DD& im, long r, int sgn_lambda) {
    r &= 3;
    if (sgn_lambda < 0 && (r & 1)) r = 4 - r;
    DD nr = re, ni = im;
    switch (r) {
        case 1: nr = im;          ni = dd_neg(re); break;
        case 2: nr = dd_neg(re);  ni = dd_neg(im); break;
        case 3: nr = dd_neg(im);  ni = re;         break;
        default: break;
    }
    re = nr;
    im = ni;
}

// closed form chi(lambda) = sum_{k,M} c 2 p! e^{i lambda a_k} / (i lambda)^{p+1}
inline ComplexSummed charfn_kernel(const LawCoefficients& lc, double lambda, EvalMode mode) {
    const auto& vals = lc.spectrum().values();
    const auto& terms = lc.terms();
    ComplexSummed out;
    const int slam = lambda > 0.0 ? 1 : -1;
    const double alam = std::abs(lambda);
    if (mode.mode == PrecisionMode::HighPrecision) {
        const mpfr_prec_t B = mode.bits, W = B + 32;
        auto coeffs = lc.mp_coefficients(B);
        MpReal re(0.0, W), im(0.0, W), sumabs(0.0, W);
        const MpReal lam_abs(alam, W);
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            if (t.sign == 0) continue;
            MpReal mag = (*coeffs)[i].abs() * MpReal::factorial(t.power, W);
            mag *= MpReal(2.0, W);
            mag /= lam_abs.pow_si(t.power + 1);
            MpReal phase = MpReal(lambda, W) * MpReal(vals[t.k], W);
            auto [s, c] = phase.sin_cos();
            // rotate (c, s) by (-i sgn)^{p+1} using exact component swaps
            long r = (t.power + 1) & 3;
            if (slam < 0 && (r & 1)) r = 4 - r;
            MpReal tr = c, ti = s;
            switch (r) {
                case 1: tr = s;  ti = -c; break;
                case 2: tr = -c; ti = -s; break;
                case 3: tr = -s; ti = c;  break;
                default: break;
            }
            if (t.sign < 0) mag = -mag;
            re += mag * tr;
            im += mag * ti;
            sumabs += mag.abs();
        }
        out.re = re.to_double();
        out.im = im.to_double();
        MpReal mod = re * re + im * im;
        if (!mod.is_zero()) out.log2_abs_value = 0.5 * static_cast<double>(mod.exp2());
        if (!sumabs.is_zero())
            out.log2_abs_err =
                static_cast<double>(sumabs.exp2()) - static_cast<double>(B) + 8.0;
        return out;
    }
    if (mode.mode == PrecisionMode::FastFloat) {
        double maxlog = -std::numeric_limits<double>::infinity();
        double extra = 0.0;
        std::vector<double> logs(terms.size());
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            if (t.sign == 0) continue;
            const double L = t.log_abs.hi + M_LN2 + dd_ln_factorial(t.power).hi -
                             (t.power + 1) * std::log(alam);
            logs[i] = L;
            maxlog = std::max(maxlog, L);
            extra = std::max(extra, std::abs(L) + std::abs(lambda * vals[t.k]) +
                                        static_cast<double>(t.power));
        }
        if (!std::isfinite(maxlog)) return out;
        NeumaierSum sre, sim, sab;
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            if (t.sign == 0) continue;
            const double mag = std::exp(logs[i] - maxlog) * t.sign;
            double c = std::cos(lambda * vals[t.k]);
            double s = std::sin(lambda * vals[t.k]);
            rotate_quarter(c, s, t.power + 1, slam);
            sre.add(mag * c);
            sim.add(mag * s);
            sab.add(std::abs(mag));
        }
        const double u = (16.0 + extra) * 0x1p-53;
        out.log2_abs_err = (maxlog + std::log(sab.value() * u + 1e-300)) / M_LN2;
        const double mod = std::hypot(sre.value(), sim.value());
        if (mod > 0.0) {
            out.log2_abs_value = (maxlog + std::log(mod)) / M_LN2;
            if (out.log2_abs_value < 1024.0) {
                out.re = sre.value() * std::exp(maxlog);
                out.im = sim.value() * std::exp(maxlog);
            }
        }
        return out;
    }
    // compensated: double-double logs and trig
    double maxlog = -std::numeric_limits<double>::infinity();
    std::vector<DD> logs(terms.size());
    for (size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (t.sign == 0) continue;
        DD L = dd_add(t.log_abs, dd_ln_factorial(t.power));
        L = dd_add(L, detail::kDDLn2);
        L = dd_sub(L, dd_mul(dd_log(alam), static_cast<double>(t.power + 1)));
        logs[i] = L;
        maxlog = std::max(maxlog, L.hi);
    }
    if (!std::isfinite(maxlog)) return out;
    DD re(0.0), im(0.0);
    NeumaierSum sab;
    for (size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (t.sign == 0) continue;
        DD mag = dd_exp(dd_sub(logs[i], DD(maxlog)));
        if (t.sign < 0) mag = dd_neg(mag);
        double ph, pl;
        two_prod(lambda, vals[t.k], ph, pl);
        DD s, c;
        dd_sin_cos(DD(ph, pl), s, c);
        rotate_quarter(c, s, t.power + 1, slam);
        re = dd_add(re, dd_mul(mag, c));
        im = dd_add(im, dd_mul(mag, s));
        sab.add(std::abs(mag.hi));
    }
    const double u = 64.0 * 0x1p-98;
    out.log2_abs_err = (maxlog + std::log(sab.value() * u + 1e-300)) / M_LN2;
    const double mod = std::hypot(re.to_double(), im.to_double());
    if (mod > 0.0) {
        out.log2_abs_value = (maxlog + std::log(mod)) / M_LN2;
        if (out.log2_abs_value < 1024.0) {
            const DD scale = dd_exp(DD(maxlog));
            out.re = dd_mul(re, scale).to_double();
            out.im = dd_mul(im, scale).to_double();
        }
    }
    return out;
}

// closed form M(y, Omega) = sum_{k,M} c 2 p! e^{y(a_k-Omega)} / y^{p+1}
inline Summed mgf_kernel(const LawCoefficients& lc, double y, double omega, EvalMode mode) {
    const auto& vals = lc.spectrum().values();
    const auto& terms = lc.terms();
    const int sy = y > 0.0 ? 1 : -1;
    const double ay = std::abs(y);
    if (mode.mode == PrecisionMode::HighPrecision) {
        const mpfr_prec_t B = mode.bits, W = B + 32;
        auto coeffs = lc.mp_coefficients(B);
        MpReal sum(0.0, W), sumabs(0.0, W);
        const MpReal y_mp(y, W);
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            if (t.sign == 0) continue;
            MpReal term = (*coeffs)[i] * MpReal::factorial(t.power, W);
            term *= MpReal(2.0, W);
            term *= ((MpReal(vals[t.k], W) - MpReal(omega, W)) * y_mp).exp();
            term /= y_mp.pow_si(t.power + 1);
            sum += term;
            sumabs += term.abs();
        }
        return finish_mp(sum, sumabs, B);
    }
    if (mode.mode == PrecisionMode::FastFloat) {
        std::vector<std::pair<int, double>> es;
        es.reserve(terms.size());
        double extra = 0.0;
        for (const auto& t : terms) {
            if (t.sign == 0) continue;
            const double L = t.log_abs.hi + M_LN2 + dd_ln_factorial(t.power).hi +
                             y * (vals[t.k] - omega) - (t.power + 1) * std::log(ay);
            es.emplace_back(t.sign * sgn_pow(sy, t.power + 1), L);
            extra = std::max(extra, std::abs(L) + std::abs(y * (vals[t.k] - omega)) +
                                        static_cast<double>(t.power));
        }
        return sum_signed_logs_fast(es, extra);
    }
    std::vector<std::pair<int, DD>> es;
    es.reserve(terms.size());
    for (const auto& t : terms) {
        if (t.sign == 0) continue;
        DD L = dd_add(t.log_abs, dd_ln_factorial(t.power));
        L = dd_add(L, detail::kDDLn2);
        double ph, pl;
        two_prod(y, vals[t.k] - omega, ph, pl); // (a-omega) rounding folded into est
        L = dd_add(L, DD(ph, pl));
        L = dd_sub(L, dd_mul(dd_log(ay), static_cast<double>(t.power + 1)));
        es.emplace_back(t.sign * sgn_pow(sy, t.power + 1), L);
    }
    return sum_signed_logs_comp(es, 128.0);
}

} // namespace detail

// Taylor/moment series branch, exact for any spectrum: chi(lambda) =
// e^{i lambda c} sum_n mu_n (i lambda)^n / n! with mu_n the central moments
// about the mid-range c.  Truncates when the next term drops below 1e-16 of
// the partial sum.
inline std::complex<double> char_fn_series(const ExactLaw& law, double lambda) {
    const auto& lc = law.coefficients();
    const double c = lc.center();
    int budget = 32;
    for (;;) {
        const auto mu = lc.central_moments(budget);
        DD re(1.0), im(0.0);   // n = 0 term
        DD coef(1.0);          // lambda^n / n!
        bool truncated = false;
        int small_streak = 0; // odd central moments vanish for symmetric laws
        for (int n = 1; n <= budget; ++n) {
            coef = dd_mul(coef, lambda / static_cast<double>(n));
            DD term = dd_mul(mu[n], coef);
            const double partial = std::hypot(re.to_double(), im.to_double());
            small_streak = std::abs(term.hi) < 1e-16 * partial ? small_streak + 1 : 0;
            if (small_streak >= 2 && n > 2) {
                truncated = true;
                break;
            }
            switch (n & 3) {
                case 0: re = dd_add(re, term); break;
                case 1: im = dd_add(im, term); break;
                case 2: re = dd_sub(re, term); break;
                default: im = dd_sub(im, term); break;
            }
        }
        if (truncated) {
            double ph, pl;
            two_prod(lambda, c, ph, pl);
            DD s, co;
            dd_sin_cos(DD(ph, pl), s, co);
            const DD fre = dd_sub(dd_mul(re, co), dd_mul(im, s));
            const DD fim = dd_add(dd_mul(re, s), dd_mul(im, co));
            return {fre.to_double(), fim.to_double()};
        }
        if (budget >= 400)
            throw PrecisionExceeded("char_fn: moment series did not converge");
        budget *= 2;
    }
}

// Residue closed form, escalated through the precision ladder.
inline std::complex<double> char_fn_closed(const ExactLaw& law, double lambda) {
    const auto& lc = law.coefficients();
    const auto rungs = detail::escalation_ladder(law.policy());
    for (const auto& rung : rungs) {
        auto r = detail::charfn_kernel(lc, lambda, rung);
        detail::Summed as_real;
        as_real.log2_abs_value = r.log2_abs_value;
        as_real.log2_abs_err = r.log2_abs_err;
        if (detail::accepted(as_real, law.policy(), 1.0)) {
            if (r.log2_abs_value >= 1024.0)
                throw PrecisionExceeded("char_fn: result overflows double");
            return {r.re, r.im};
        }
    }
    throw PrecisionExceeded("char_fn: cancellation exceeds the precision policy");
}

// chi(lambda) = E e^{i lambda A}; entire, |chi| <= 1, chi(0) = 1 exactly.
inline std::complex<double> char_fn(const ExactLaw& law, double lambda) {
    if (law.is_point_mass())
        return std::polar(1.0, lambda * law.point_mass().location);
    if (lambda == 0.0) return {1.0, 0.0};
    const auto& s = law.spectrum();
    std::complex<double> chi =
        std::abs(lambda) * s.range() < law.policy().taylor_switch_radius
            ? char_fn_series(law, lambda)
            : char_fn_closed(law, lambda);
    const double mod = std::abs(chi);
    if (mod > 1.0) chi /= mod; // roundoff clamp onto the unit disk
    return chi;
}

inline double mgf_series(const ExactLaw& law, double y, double omega) {
    const auto& lc = law.coefficients();
    const double c = lc.center();
    int budget = 32;
    for (;;) {
        const auto mu = lc.central_moments(budget);
        DD acc(1.0), coef(1.0);
        bool truncated = false;
        int small_streak = 0;
        for (int n = 1; n <= budget; ++n) {
            coef = dd_mul(coef, y / static_cast<double>(n));
            DD term = dd_mul(mu[n], coef);
            small_streak = std::abs(term.hi) < 1e-16 * std::abs(acc.hi) ? small_streak + 1 : 0;
            if (small_streak >= 2 && n > 2) {
                truncated = true;
                break;
            }
            acc = dd_add(acc, term);
        }
        if (truncated) {
            double ph, pl;
            two_prod(y, c - omega, ph, pl);
            const double v = dd_mul(acc, dd_exp(DD(ph, pl))).to_double();
            if (!std::isfinite(v)) throw PrecisionExceeded("mgf: overflow");
            return v;
        }
        if (budget >= 400) throw PrecisionExceeded("mgf: moment series did not converge");
        budget *= 2;
    }
}

inline double mgf_closed(const ExactLaw& law, double y, double omega) {
    const auto& lc = law.coefficients();
    return detail::run_ladder(law.policy(), "mgf", 1.0, [&](detail::EvalMode m) {
        return detail::mgf_kernel(lc, y, omega, m);
    });
}

// M(y, Omega) = E e^{y(A - Omega)} = e^{-Omega y} M(y, 0); M(0, .) = 1.
inline double mgf(const ExactLaw& law, double y, double omega = 0.0) {
    if (law.is_point_mass()) {
        const double v = std::exp(y * (law.point_mass().location - omega));
        if (!std::isfinite(v)) throw PrecisionExceeded("mgf: overflow");
        return v;
    }
    if (y == 0.0) return 1.0;
    const auto& s = law.spectrum();
    const double v = std::abs(y) * s.range() < law.policy().taylor_switch_radius
                         ? mgf_series(law, y, omega)
                         : mgf_closed(law, y, omega);
    if (!std::isfinite(v)) throw PrecisionExceeded("mgf: overflow");
    return v;
}

// sum_k (a_k - Omega)^n / prod_{j != k}(a_k - a_j): 0 for n <= d-2, 1 for
// n = d-1, any Omega.  Non-degenerate spectra only.  Double-double with an
// MPFR retry when the terms are large enough to swamp its 106 bits.
inline double identity_check(const Spectrum& s, double omega, int n) {
    if (s.is_degenerate())
        throw RequiresNonDegenerate("identity_check: spectrum must be non-degenerate");
    const int d = s.dimension();
    if (n < 0 || n > d - 1)
        throw InvalidArgument("identity_check: need 0 <= n <= d-1");
    const auto& vals = s.values();
    DD acc(0.0);
    double sumabs = 0.0;
    for (int k = 0; k < d; ++k) {
        DD num = dd_pow_int(DD::from_sum(vals[k], -omega), n);
        DD den(1.0);
        for (int j = 0; j < d; ++j)
            if (j != k) den = dd_mul(den, DD::from_sum(vals[k], -vals[j]));
        const DD term = dd_div(num, den);
        sumabs += std::abs(term.hi);
        acc = dd_add(acc, term);
    }
    if (sumabs * 0x1p-100 * d < 1e-13) return acc.to_double();
    const mpfr_prec_t prec =
        static_cast<mpfr_prec_t>(128 + std::max(0.0, std::log2(sumabs + 1.0)));
    MpReal mp_acc(0.0, prec);
    for (int k = 0; k < d; ++k) {
        MpReal term = (MpReal(vals[k], prec) - MpReal(omega, prec)).pow_si(n);
        for (int j = 0; j < d; ++j)
            if (j != k) term /= MpReal(vals[k], prec) - MpReal(vals[j], prec);
        mp_acc += term;
    }
    return mp_acc.to_double();
}

} // namespace haarlaw
