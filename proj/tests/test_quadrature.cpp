#include "haarlaw/quadrature.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace haarlaw;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2m-1 exactly") {
    for (int m : {1, 2, 3, 5, 8, 16, 33}) {
        const int deg = 2 * m - 1;
        // integral of x^deg over [0,1] = 1/(deg+1)
        const double got =
            gauss_legendre_integrate([&](double x) { return std::pow(x, deg); }, 0.0, 1.0, m);
        CHECK(got == Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
}

TEST_CASE("Gauss-Legendre nodes are symmetric and weights sum to 2") {
    for (int m : {4, 7, 12}) {
        const auto& rule = gauss_legendre(m);
        double wsum = 0.0;
        for (int i = 0; i < m; ++i) {
            wsum += rule.weights[i];
            CHECK(rule.nodes[i] == Approx(-rule.nodes[m - 1 - i]).margin(1e-15));
        }
        CHECK(wsum == Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("law mass and mean via per-piece quadrature") {
    const auto uniform = compile_law(build_spectrum({0.0, 1.0}));
    CHECK(law_moment_quadrature(uniform, 0) == Approx(1.0).epsilon(1e-13));
    CHECK(law_moment_quadrature(uniform, 1) == Approx(0.5).epsilon(1e-12));
    CHECK(law_moment_quadrature(uniform, 2) == Approx(1.0 / 3.0).epsilon(1e-12));

    const auto pm = compile_law(generate(SpectrumKind::constant(2.0), 3));
    CHECK(law_moment_quadrature(pm, 3) == 8.0);
}
