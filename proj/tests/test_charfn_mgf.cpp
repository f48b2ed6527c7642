#include "haarlaw/law.hpp"
#include "haarlaw/quadrature.hpp"

#include "test_util.hpp"

#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <random>

using namespace haarlaw;
using haarlaw::testutil::random_spectrum;

namespace {

// Fourier integral of the density by composite Gauss-Legendre per piece,
// independent of the residue closed form
std::complex<double> char_fn_fourier(const ExactLaw& law, double lambda) {
    const auto& vals = law.spectrum().values();
    std::complex<double> acc{0.0, 0.0};
    for (size_t j = 0; j + 1 < vals.size(); ++j) {
        const double a = vals[j], b = vals[j + 1];
        const int pieces = 4 + static_cast<int>(std::abs(lambda) * (b - a));
        for (int p = 0; p < pieces; ++p) {
            const double lo = a + (b - a) * p / pieces;
            const double hi = a + (b - a) * (p + 1) / pieces;
            acc += std::complex<double>(
                gauss_legendre_integrate(
                    [&](double x) { return std::cos(lambda * x) * density(law, x); }, lo,
                    hi, 24),
                gauss_legendre_integrate(
                    [&](double x) { return std::sin(lambda * x) * density(law, x); }, lo,
                    hi, 24));
        }
    }
    return acc;
}

} // namespace

TEST_CASE("char_fn of the uniform law is (e^{il} - 1)/(il)") {
    const auto law = compile_law(build_spectrum({0.0, 1.0}));
    for (double l : {1e-8, 0.1, 0.5, 0.999, 1.001, 3.0, 17.5, -4.2, 120.0}) {
        // stable form of (e^{il} - 1)/(il): e^{il/2} sinc(l/2)
        const std::complex<double> want =
            std::polar(1.0, l / 2.0) * (std::sin(l / 2.0) / (l / 2.0));
        const auto got = char_fn(law, l);
        CHECK(std::abs(got - want) < 1e-12);
    }
    CHECK(char_fn(law, 0.0) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("char_fn trivial properties") {
    const auto pm = compile_law(generate(SpectrumKind::constant(2.5), 4));
    const auto got = char_fn(pm, 1.7);
    CHECK(got.real() == Approx(std::cos(1.7 * 2.5)).epsilon(1e-15));
    CHECK(got.imag() == Approx(std::sin(1.7 * 2.5)).epsilon(1e-15));

    std::mt19937_64 rng(3);
    const auto law = compile_law(random_spectrum(rng, 7));
    CHECK(char_fn(law, 0.0) == std::complex<double>(1.0, 0.0));
    for (double l = -30.0; l <= 30.0; l += 1.7)
        CHECK(std::abs(char_fn(law, l)) <= 1.0 + 1e-15);
}

TEST_CASE("char_fn agrees with the direct Fourier integral for small d") {
    std::mt19937_64 rng(11);
    for (int d : {2, 3, 4, 6}) {
        const auto s = random_spectrum(rng, d, 5e-2);
        const auto law = compile_law(s);
        for (double l : {-20.0, -7.3, -1.0, 0.3, 2.0, 9.9, 20.0}) {
            const auto want = char_fn_fourier(law, l);
            const auto got = char_fn(law, l);
            CHECK(std::abs(got - want) < 1e-6);
        }
    }
}

TEST_CASE("series and closed-form branches agree on an annulus around the switch") {
    for (int d : {4, 10, 17, 30}) {
        std::vector<double> vals(d);
        for (int k = 1; k <= d; ++k) vals[k - 1] = static_cast<double>(k) / d;
        const auto law = compile_law(build_spectrum(vals, 0.0));
        const double r = law.spectrum().range();
        for (double scaled : {0.5, 0.8, 0.99, 1.01, 1.5, 2.0}) {
            const double l = scaled / r;
            const auto a = char_fn_series(law, l);
            const auto b = char_fn_closed(law, l);
            CHECK(std::abs(a - b) < 1e-12);
        }
    }
}

TEST_CASE("mgf: uniform law and shift identity") {
    const auto law = compile_law(build_spectrum({0.0, 1.0}));
    CHECK(mgf(law, 1.0, 0.0) == Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(mgf(law, 0.0, 3.0) == 1.0);
    // M(y, Omega) = e^{-Omega y} M(y, 0)
    for (double y : {-2.0, 0.3, 1.0, 4.0}) {
        const double m0 = mgf(law, y, 0.0);
        CHECK(mgf(law, y, 1.25) == Approx(std::exp(-1.25 * y) * m0).epsilon(1e-12));
    }
}

TEST_CASE("mgf of the rank-1 projector matches the factorial-ratio series") {
    for (int d : {2, 5, 12}) {
        const auto law = compile_law(generate(SpectrumKind::projector(1), d));
        for (double y : {-1.5, 0.2, 0.7, 2.0}) {
            // sum_n y^n (d-1)!/(d+n-1)!, terms via the stable product form
            double term = 1.0, sum = 1.0;
            for (int n = 1; n < 200; ++n) {
                term *= y / (d + n - 1);
                sum += term;
                if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            }
            CHECK(mgf(law, y, 0.0) == Approx(sum).epsilon(1e-11));
        }
    }
}

TEST_CASE("mgf agrees with quadrature of e^{yx} P(x)") {
    std::mt19937_64 rng(29);
    const auto s = random_spectrum(rng, 5);
    const auto law = compile_law(s);
    for (double y : {-3.0, -0.4, 0.9, 2.5}) {
        const auto& vals = s.values();
        double want = 0.0;
        for (size_t j = 0; j + 1 < vals.size(); ++j)
            want += gauss_legendre_integrate(
                [&](double x) { return std::exp(y * x) * density(law, x); }, vals[j],
                vals[j + 1], 40);
        CHECK(mgf(law, y, 0.0) == Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("mgf series/closed annulus cross-check") {
    for (int d : {4, 12, 24}) {
        std::vector<double> vals(d);
        for (int k = 1; k <= d; ++k) vals[k - 1] = static_cast<double>(k) / d;
        const auto law = compile_law(build_spectrum(vals, 0.0));
        const double r = law.spectrum().range();
        for (double scaled : {0.5, 0.9, 1.1, 2.0}) {
            for (double sign : {1.0, -1.0}) {
                const double y = sign * scaled / r;
                CHECK(mgf_series(law, y, 0.0) ==
                      Approx(mgf_closed(law, y, 0.0)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("mgf overflow raises PrecisionExceeded") {
    const auto law = compile_law(generate(SpectrumKind::number_operator(), 4));
    CHECK_THROWS_AS(mgf(law, 400.0, 0.0), PrecisionExceeded);
    const auto pm = compile_law(generate(SpectrumKind::constant(3.0), 2));
    CHECK_THROWS_AS(mgf(pm, 400.0, 0.0), PrecisionExceeded);
}
