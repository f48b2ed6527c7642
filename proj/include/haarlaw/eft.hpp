/*
 * eft.hpp — error-free transformations and double-double arithmetic.
 *
 * The alternating sums behind the exact laws cancel catastrophically, so the
 * term products and accumulators need more than plain binary64.  This header
 * provides the two cheap rungs of the precision ladder:
 *
 *   - Neumaier (improved Kahan) compensated summation,
 *   - a double-double type (~106 significand bits) with exp/log, used for
 *     coefficient log-magnitudes and the `compensated` evaluation mode.
 *
 * The expensive rung (arbitrary precision) lives in mpreal.hpp.
 */

#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace haarlaw {

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

// requires |a| >= |b|
inline void quick_two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    e = b - (s - a);
}

inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    e = std::fma(a, b, -p);
}

// Running compensated sum.  Error ~ u*|sum| + n*u^2*sum|x|, effectively one
// rounding for realistic n.
class NeumaierSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Double-double value hi + lo with |lo| <= ulp(hi)/2.  Operations follow the
// classic Dekker/Bailey QD routines.
struct DD {
    double hi = 0.0;
    double lo = 0.0;

    DD() = default;
    DD(double h) : hi(h), lo(0.0) {}
    DD(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }
    bool is_finite() const { return std::isfinite(hi) && std::isfinite(lo); }

    static DD from_sum(double a, double b) {
        DD r;
        two_sum(a, b, r.hi, r.lo);
        return r;
    }
};

inline DD dd_add(const DD& a, const DD& b) {
    double s1, s2, t1, t2;
    two_sum(a.hi, b.hi, s1, s2);
    two_sum(a.lo, b.lo, t1, t2);
    s2 += t1;
    quick_two_sum(s1, s2, s1, s2);
    s2 += t2;
    quick_two_sum(s1, s2, s1, s2);
    return DD(s1, s2);
}

inline DD dd_neg(const DD& a) { return DD(-a.hi, -a.lo); }

inline DD dd_sub(const DD& a, const DD& b) { return dd_add(a, dd_neg(b)); }

inline DD dd_mul(const DD& a, const DD& b) {
    double p1, p2;
    two_prod(a.hi, b.hi, p1, p2);
    p2 += a.hi * b.lo + a.lo * b.hi;
    quick_two_sum(p1, p2, p1, p2);
    return DD(p1, p2);
}

inline DD dd_mul(const DD& a, double b) {
    double p1, p2;
    two_prod(a.hi, b, p1, p2);
    p2 += a.lo * b;
    quick_two_sum(p1, p2, p1, p2);
    return DD(p1, p2);
}

inline DD dd_div(const DD& a, const DD& b) {
    double q1 = a.hi / b.hi;
    DD r = dd_sub(a, dd_mul(b, q1));
    double q2 = r.hi / b.hi;
    r = dd_sub(r, dd_mul(b, q2));
    double q3 = r.hi / b.hi;
    double s, e;
    quick_two_sum(q1, q2, s, e);
    DD q(s, e);
    return dd_add(q, DD(q3));
}

inline DD dd_ldexp(const DD& a, int n) {
    return DD(std::ldexp(a.hi, n), std::ldexp(a.lo, n));
}

inline int dd_cmp(const DD& a, const DD& b) {
    if (a.hi < b.hi) return -1;
    if (a.hi > b.hi) return 1;
    if (a.lo < b.lo) return -1;
    if (a.lo > b.lo) return 1;
    return 0;
}

inline DD dd_abs(const DD& a) { return a.hi < 0.0 ? dd_neg(a) : a; }

namespace detail {
// ln(2) to double-double accuracy
inline const DD kDDLn2{6.93147180559945286e-01, 2.31904681384629956e-17};
} // namespace detail

// exp(a) for |a.hi| <= ~709; underflows to 0, overflows to +inf like std::exp.
inline DD dd_exp(const DD& a) {
    if (a.hi > 709.0) return DD(std::numeric_limits<double>::infinity());
    if (a.hi < -745.0) return DD(0.0);
    // a = m*ln2 + 512*r, exp(a) = 2^m * (1+p)^512 with p = expm1(r)
    const double m = std::nearbyint(a.hi / detail::kDDLn2.hi);
    DD r = dd_sub(a, dd_mul(detail::kDDLn2, m));
    r = dd_ldexp(r, -9);
    // Taylor for expm1(r), |r| <= ln2/1024; exact integer divisors keep the
    // coefficients accurate to full double-double precision
    DD p = r;
    DD term = r;
    for (int i = 2; i <= 12; ++i) {
        term = dd_mul(term, r);
        term = dd_div(term, DD(static_cast<double>(i)));
        p = dd_add(p, term);
        if (std::abs(term.hi) < 1e-36 * std::abs(p.hi)) break;
    }
    // square back: expm1(2x) = 2*expm1(x) + expm1(x)^2
    for (int i = 0; i < 9; ++i)
        p = dd_add(dd_ldexp(p, 1), dd_mul(p, p));
    DD res = dd_add(DD(1.0), p);
    return dd_ldexp(res, static_cast<int>(m));
}

// natural log of a positive double-double; one Newton step off std::log
inline DD dd_log(const DD& a) {
    const double y0 = std::log(a.hi);
    // y1 = y0 + (a*e^{-y0} - 1), accurate to ~2^-104
    DD r = dd_mul(a, dd_exp(DD(-y0)));
    DD d = dd_sub(r, DD(1.0));
    // second-order correction: log(1+d) ~ d - d^2/2
    DD corr = dd_sub(d, dd_ldexp(dd_mul(d, d), -1));
    return dd_add(DD(y0), corr);
}

inline DD dd_log(double a) { return dd_log(DD(a)); }

namespace detail {
inline const DD kDDPi{3.14159265358979311600e+00, 1.22464679914735317723e-16};
inline const DD kDDTwoPi{6.28318530717958623200e+00, 2.44929359829470635446e-16};
inline const DD kDDHalfPi{1.57079632679489655800e+00, 6.12323399573676588613e-17};
} // namespace detail

// integer power by squaring
inline DD dd_pow_int(const DD& base, long e) {
    if (e == 0) return DD(1.0);
    bool inv = e < 0;
    unsigned long n = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    DD acc(1.0), b = base;
    while (n) {
        if (n & 1UL) acc = dd_mul(acc, b);
        n >>= 1;
        if (n) b = dd_mul(b, b);
    }
    return inv ? dd_div(DD(1.0), acc) : acc;
}

// simultaneous sin/cos with argument reduction mod pi/2
inline void dd_sin_cos(const DD& theta, DD& s_out, DD& c_out) {
    DD t = theta;
    const double n = std::nearbyint(t.hi / detail::kDDTwoPi.hi);
    t = dd_sub(t, dd_mul(detail::kDDTwoPi, n));
    const double qd = std::nearbyint(t.hi / detail::kDDHalfPi.hi);
    t = dd_sub(t, dd_mul(detail::kDDHalfPi, qd));
    const int q = static_cast<int>(qd) & 3; // two's complement & gives the mod-4 residue

    const DD t2 = dd_mul(t, t);
    // sin(t), |t| <= pi/4 + eps
    DD s = t, term = t;
    for (int k = 1; k <= 16; ++k) {
        term = dd_neg(dd_div(dd_mul(term, t2), DD(static_cast<double>(2 * k * (2 * k + 1)))));
        s = dd_add(s, term);
        if (std::abs(term.hi) < 1e-35 * (std::abs(s.hi) + 1e-300)) break;
    }
    // cos(t)
    DD c(1.0);
    term = DD(1.0);
    for (int k = 1; k <= 16; ++k) {
        term = dd_neg(dd_div(dd_mul(term, t2), DD(static_cast<double>((2 * k - 1) * 2 * k))));
        c = dd_add(c, term);
        if (std::abs(term.hi) < 1e-35) break;
    }
    switch (q) {
        case 0: s_out = s; c_out = c; break;
        case 1: s_out = c; c_out = dd_neg(s); break;
        case 2: s_out = dd_neg(s); c_out = dd_neg(c); break;
        default: s_out = dd_neg(c); c_out = s; break;
    }
}

// ln(n!) with double-double accuracy, memoized prefix sums of ln k
inline DD dd_ln_factorial(unsigned n) {
    static thread_local std::vector<DD> table{DD(0.0), DD(0.0)}; // 0!, 1!
    while (table.size() <= n) {
        const unsigned k = static_cast<unsigned>(table.size());
        table.push_back(dd_add(table.back(), dd_log(static_cast<double>(k))));
    }
    return table[n];
}

// ln C(n, k)
inline DD dd_ln_binomial(unsigned n, unsigned k) {
    return dd_sub(dd_ln_factorial(n),
                  dd_add(dd_ln_factorial(k), dd_ln_factorial(n - k)));
}

} // namespace haarlaw
