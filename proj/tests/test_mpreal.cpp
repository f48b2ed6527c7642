#include "haarlaw/mpreal.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace haarlaw;

TEST_CASE("MpReal basics") {
    MpReal a(1.5, 128), b(2.5, 128);
    CHECK((a + b).to_double() == 4.0);
    CHECK((a * b).to_double() == 3.75);
    CHECK((a - b).sign() == -1);
    CHECK((a / b).to_double() == 0.6);
    CHECK(MpReal(0.0, 64).is_zero());
    CHECK(MpReal(2.0, 128).pow_si(100).exp2() == 100);
}

TEST_CASE("MpReal keeps precision through copies and moves") {
    MpReal a(1.0 / 3.0, 512);
    MpReal b = a;
    CHECK(b.prec() == 512);
    MpReal c = std::move(b);
    CHECK(c.prec() == 512);
    CHECK(c.to_double() == Approx(1.0 / 3.0));
}

TEST_CASE("MpReal transcendentals against libm") {
    CHECK(MpReal(2.0, 256).log().to_double() == Approx(std::log(2.0)).epsilon(1e-16));
    CHECK(MpReal(0.5, 256).exp().to_double() == Approx(std::exp(0.5)).epsilon(1e-16));
    auto [s, c] = MpReal(1.2345, 256).sin_cos();
    CHECK(s.to_double() == Approx(std::sin(1.2345)).epsilon(1e-15));
    CHECK(c.to_double() == Approx(std::cos(1.2345)).epsilon(1e-15));
    CHECK(MpReal::pi(256).to_double() == Approx(M_PI).epsilon(1e-16));
}

TEST_CASE("MpReal factorials and binomials are exact") {
    CHECK(MpReal::factorial(10, 128).to_double() == 3628800.0);
    CHECK(MpReal::binomial(10, 3, 128).to_double() == 120.0);
    // 52 choose 26, large but exactly representable at 256 bits
    CHECK(MpReal::binomial(52, 26, 256).to_double() == 495918532948104.0);
}

TEST_CASE("massive cancellation survives at high precision") {
    MpReal one(1.0, 512);
    MpReal tiny(0.0, 512);
    mpfr_set_ui_2exp(tiny.raw(), 1, -400, MPFR_RNDN); // 2^-400
    MpReal sum = one + tiny - one;
    CHECK(sum.exp2() == -400);
}
