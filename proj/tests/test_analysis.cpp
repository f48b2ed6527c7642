#include "haarlaw/analysis.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace haarlaw;

TEST_CASE("Levy constants match the quoted values") {
    CHECK(kLevyProjectorC == Approx(1.0 / 386.85).epsilon(1e-3)); // ~1/387
    CHECK(kLevyNumberOperatorC == Approx(0.0103).epsilon(1e-2)); // ~1/97
    CHECK(kLevyC1 == Approx(1.0 / (9.0 * std::pow(M_PI, 3) * std::log(2.0))).epsilon(1e-15));
}

TEST_CASE("projector tail equals (1 - 1/d - eps)^{d-1} and Levy dominates") {
    for (int d : {4, 16, 64}) {
        std::vector<double> eps;
        for (double e = 0.01; e < 0.8; e += 0.02) eps.push_back(e);
        const auto rep = levy_compare(generate(SpectrumKind::projector(1), d), eps);
        CHECK(rep.eta == 2.0);
        CHECK(rep.exp_constant == Approx(kLevyProjectorC * d).epsilon(1e-12));
        for (size_t i = 0; i < eps.size(); ++i) {
            const double want = 1.0 / d + eps[i] < 1.0
                                    ? std::pow(1.0 - (1.0 + eps[i] * d) / d, d - 1)
                                    : 0.0;
            CHECK(rep.exact_tail[i] == Approx(want).margin(1e-12));
        }
        CHECK(rep.dominance_violations.empty());
    }
}

TEST_CASE("projector tail approaches e^{-1} e^{-eps d} for small eps, large d") {
    const int d = 1000;
    const double eps = 0.005;
    const auto rep = levy_compare(generate(SpectrumKind::projector(1), d), {eps});
    const double asym = std::exp(-1.0) * std::exp(-eps * d);
    CHECK(rep.exact_tail[0] / asym > 0.9);
    CHECK(rep.exact_tail[0] / asym < 1.1);
}

TEST_CASE("levy_compare argument checks") {
    CHECK_THROWS_AS(levy_compare(generate(SpectrumKind::constant(1.0), 4), {0.1}),
                    DegenerateLaw);
    CHECK_THROWS_AS(levy_compare(generate(SpectrumKind::projector(1), 4), {0.0}),
                    InvalidArgument);
    CHECK_THROWS_AS(number_operator_tail(2, {1.0}), InvalidArgument);
}

TEST_CASE("number operator tail study") {
    std::vector<double> eps;
    for (double e = 0.5; e <= 10.0; e += 0.5) eps.push_back(e);
    const auto rep = number_operator_tail(50, eps);
    // B(d, 0+) ~ 1/2: symmetric spectrum about (d+1)/2
    const auto law = compile_law(generate(SpectrumKind::number_operator(), 50));
    CHECK(survival(law, 51.0 / 2.0) == Approx(0.5).margin(1e-10));
    REQUIRE(rep.fitted_c.has_value());
    CHECK(*rep.fitted_c > 0.0);
    CHECK(*rep.reference_c == 0.25);
    CHECK(*rep.levy_c_prime == Approx(0.0103).epsilon(1e-2));
    CHECK(rep.dominance_violations.empty());
    // the exponential fit tracks the curve within a small factor mid-window
    // (the log-tail is closer to quadratic at d=50, so only order-of-magnitude)
    const double mid = survival(law, 25.5 + 5.0);
    const double predicted = *rep.fitted_alpha * std::exp(-*rep.fitted_c * 5.0);
    CHECK(predicted / mid > 0.3);
    CHECK(predicted / mid < 3.0);
}

TEST_CASE("clt diagnostics: rescaled densities normalize and approach normal") {
    const auto rep = clt_diagnostics(SpectrumKind::power(1.0), {8, 16, 32, 64}, 161);
    REQUIRE(rep.points.size() == 4);
    // sup-norm gap decreases along the d grid (5% slack per step)
    for (size_t i = 0; i + 1 < rep.points.size(); ++i)
        CHECK(rep.points[i + 1].supnorm_gap <= rep.points[i].supnorm_gap * 1.05);

    // rescaled density integrates to 1 with mean 0, variance 1 (quadrature in z)
    for (const auto& pt : rep.points) {
        if (pt.d != 16) continue;
        const auto s = generate(SpectrumKind::power(1.0), pt.d);
        const auto law = compile_law(s);
        const auto mom = moments_compact(s, 3);
        const double m1 = mom.kappa[0], sd = std::sqrt(mom.kappa[1]);
        double mass = 0.0, mean = 0.0, var = 0.0;
        const auto& vals = s.values();
        for (size_t j = 0; j + 1 < vals.size(); ++j) {
            const double zlo = (vals[j] - m1) / sd, zhi = (vals[j + 1] - m1) / sd;
            auto pz = [&](double z) { return sd * density(law, m1 + z * sd); };
            mass += gauss_legendre_integrate(pz, zlo, zhi, 24);
            mean += gauss_legendre_integrate([&](double z) { return z * pz(z); }, zlo, zhi, 24);
            var += gauss_legendre_integrate([&](double z) { return z * z * pz(z); }, zlo,
                                            zhi, 24);
        }
        CHECK(mass == Approx(1.0).margin(1e-6));
        CHECK(mean == Approx(0.0).margin(1e-6));
        CHECK(var == Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("clt kappa3(Z) scaling for power spectra") {
    const auto rep = clt_diagnostics(SpectrumKind::power(2.0), {16, 32, 64, 128}, 0);
    CHECK(rep.kappa3z_slope.slope == Approx(-0.5).margin(0.1));
    for (const auto& pt : rep.points) CHECK(pt.kappa2 > 0.0);
}

TEST_CASE("clt argument checks") {
    CHECK_THROWS_AS(clt_diagnostics(SpectrumKind::projector(1), {8, 16}, 0),
                    InvalidArgument);
    CHECK_THROWS_AS(clt_diagnostics(SpectrumKind::log(), {2, 8}, 0), InvalidArgument);
    CHECK_THROWS_AS(clt_diagnostics(SpectrumKind::log(), {16, 8}, 0), InvalidArgument);
}

TEST_CASE("line fit recovers a known slope") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0}, ys;
    for (double x : xs) ys.push_back(3.0 - 2.0 * x);
    const auto f = fit_line(xs, ys);
    CHECK(f.slope == Approx(-2.0).epsilon(1e-12));
    CHECK(f.intercept == Approx(3.0).epsilon(1e-12));
}
