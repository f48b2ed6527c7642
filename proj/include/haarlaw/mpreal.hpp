/*
 * mpreal.hpp — minimal RAII wrapper over MPFR for the high_precision mode.
 *
 * Value semantics, per-variable precision in bits; binary operators round to
 * the wider operand's precision.  Only the operations the law kernels need
 * are wrapped; raw() escapes to the C API where convenient.
 */

#pragma once

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

namespace haarlaw {

class MpReal {
  public:
    explicit MpReal(mpfr_prec_t prec = 128) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    MpReal(double x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }
    MpReal(long x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_si(v_, x, MPFR_RNDN);
    }
    MpReal(const MpReal& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    MpReal(MpReal&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    MpReal& operator=(const MpReal& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    MpReal& operator=(MpReal&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~MpReal() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // floor(log2|x|); only meaningful for nonzero finite values
    long exp2() const { return static_cast<long>(mpfr_get_exp(v_)) - 1; }

    MpReal& operator+=(const MpReal& o) {
        mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    MpReal& operator-=(const MpReal& o) {
        mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    MpReal& operator*=(const MpReal& o) {
        mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    MpReal& operator/=(const MpReal& o) {
        mpfr_div(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    MpReal& operator*=(double x) {
        mpfr_mul_d(v_, v_, x, MPFR_RNDN);
        return *this;
    }
    MpReal& operator*=(long x) {
        mpfr_mul_si(v_, v_, x, MPFR_RNDN);
        return *this;
    }
    MpReal& operator/=(long x) {
        mpfr_div_si(v_, v_, x, MPFR_RNDN);
        return *this;
    }

    friend MpReal operator+(const MpReal& a, const MpReal& b) {
        MpReal r(widest(a, b));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal operator-(const MpReal& a, const MpReal& b) {
        MpReal r(widest(a, b));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal operator*(const MpReal& a, const MpReal& b) {
        MpReal r(widest(a, b));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal operator/(const MpReal& a, const MpReal& b) {
        MpReal r(widest(a, b));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend MpReal operator-(const MpReal& a) {
        MpReal r(a.prec());
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator==(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

    MpReal abs() const {
        MpReal r(prec());
        mpfr_abs(r.v_, v_, MPFR_RNDN);
        return r;
    }
    MpReal pow_si(long e) const {
        MpReal r(prec());
        mpfr_pow_si(r.v_, v_, e, MPFR_RNDN);
        return r;
    }
    MpReal exp() const {
        MpReal r(prec());
        mpfr_exp(r.v_, v_, MPFR_RNDN);
        return r;
    }
    MpReal log() const {
        MpReal r(prec());
        mpfr_log(r.v_, v_, MPFR_RNDN);
        return r;
    }
    MpReal sqrt() const {
        MpReal r(prec());
        mpfr_sqrt(r.v_, v_, MPFR_RNDN);
        return r;
    }
    // (sin x, cos x) in one reduction
    std::pair<MpReal, MpReal> sin_cos() const {
        MpReal s(prec()), c(prec());
        mpfr_sin_cos(s.v_, c.v_, v_, MPFR_RNDN);
        return {std::move(s), std::move(c)};
    }
    MpReal mul_2si(long k) const {
        MpReal r(prec());
        mpfr_mul_2si(r.v_, v_, k, MPFR_RNDN);
        return r;
    }

    static MpReal pi(mpfr_prec_t prec) {
        MpReal r(prec);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }
    static MpReal factorial(unsigned long n, mpfr_prec_t prec) {
        MpReal r(prec);
        mpfr_fac_ui(r.v_, n, MPFR_RNDN);
        return r;
    }
    static MpReal binomial(unsigned long n, unsigned long k, mpfr_prec_t prec) {
        MpReal r = factorial(n, prec);
        r /= factorial(k, prec);
        r /= factorial(n - k, prec);
        return r;
    }

    std::string str(size_t digits = 20) const {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", static_cast<int>(digits), v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

  private:
    static mpfr_prec_t widest(const MpReal& a, const MpReal& b) {
        return a.prec() > b.prec() ? a.prec() : b.prec();
    }
    mpfr_t v_;
};

} // namespace haarlaw
