#include "haarlaw/eft.hpp"
#include "haarlaw/mpreal.hpp"

#include <catch2/catch.hpp>

#include <cmath>
#include <random>

using namespace haarlaw;

namespace {
double rel_err_vs_mpfr(const DD& got, const MpReal& want) {
    MpReal g(got.hi, 256);
    g += MpReal(got.lo, 256);
    MpReal diff = g - want;
    if (diff.is_zero()) return 0.0;
    const double w = want.to_double();
    return std::abs(diff.to_double() / (w == 0.0 ? 1.0 : w));
}
} // namespace

TEST_CASE("two_sum and two_prod are error-free") {
    double s, e;
    two_sum(1.0, 1e-30, s, e);
    CHECK(s == 1.0);
    CHECK(e == 1e-30);
    two_prod(1.0 + 0x1p-30, 1.0 - 0x1p-30, s, e);
    // product is 1 - 2^-60 exactly: s + e must reproduce it
    CHECK(s + e == 1.0 - 0x1p-60);
}

TEST_CASE("Neumaier summation recovers catastrophic cancellation") {
    NeumaierSum acc;
    acc.add(1e100);
    acc.add(1.0);
    acc.add(-1e100);
    CHECK(acc.value() == 1.0);
}

TEST_CASE("double-double arithmetic round trip") {
    const DD a = dd_add(DD(1.0), DD(1e-25));
    CHECK(dd_sub(a, DD(1.0)).to_double() == Approx(1e-25).epsilon(1e-14));
    const DD q = dd_div(DD(1.0), DD(3.0));
    CHECK(dd_mul(q, DD(3.0)).to_double() == Approx(1.0).margin(1e-30));
}

TEST_CASE("dd_exp / dd_log / dd_sin_cos track MPFR to ~1e-30") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        CHECK(rel_err_vs_mpfr(dd_exp(DD(x)), MpReal(x, 256).exp()) < 1e-29);
    }
    std::uniform_real_distribution<double> up(1e-8, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double x = up(rng);
        CHECK(rel_err_vs_mpfr(dd_log(DD(x)), MpReal(x, 256).log()) < 1e-29);
    }
    std::uniform_real_distribution<double> ut(-300.0, 300.0);
    for (int i = 0; i < 200; ++i) {
        const double t = ut(rng);
        DD s, c;
        dd_sin_cos(DD(t), s, c);
        auto [ws, wc] = MpReal(t, 256).sin_cos();
        CHECK(std::abs(s.to_double() - ws.to_double()) < 1e-28);
        CHECK(std::abs(c.to_double() - wc.to_double()) < 1e-28);
        // Pythagorean identity in dd
        const DD one = dd_add(dd_mul(s, s), dd_mul(c, c));
        CHECK(std::abs(one.to_double() - 1.0) < 1e-29);
    }
}

TEST_CASE("dd_pow_int matches repeated multiplication and MPFR") {
    CHECK(dd_pow_int(DD(2.0), 10).to_double() == 1024.0);
    CHECK(dd_pow_int(DD(2.0), -2).to_double() == 0.25);
    CHECK(rel_err_vs_mpfr(dd_pow_int(DD(0.7), 41), MpReal(0.7, 256).pow_si(41)) < 1e-29);
}

TEST_CASE("ln factorial table") {
    CHECK(dd_ln_factorial(0).to_double() == 0.0);
    CHECK(dd_ln_factorial(1).to_double() == 0.0);
    CHECK(dd_ln_factorial(5).to_double() == Approx(std::log(120.0)).epsilon(1e-15));
    const double want = MpReal::factorial(200, 256).log().to_double();
    CHECK(dd_ln_factorial(200).to_double() == Approx(want).epsilon(1e-15));
}
