/*
 * quadrature.hpp — Gauss–Legendre integration of the piecewise-polynomial laws.
 *
 * Between consecutive distinct eigenvalues the density is a polynomial of
 * degree d-2, so m-node Gauss–Legendre per piece is exact once 2m-1 covers the
 * integrand degree.  Used for normalization checks and the quadrature moment
 * route.
 */

#pragma once

#include "haarlaw/law.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

namespace haarlaw {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights; // sum to 2
};

// Newton iteration on the Legendre recurrence; cached per order.
inline const GaussLegendreRule& gauss_legendre(int m) {
    static std::mutex mu;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    GaussLegendreRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x; // ascending
        rule.weights[i] = w;
        rule.nodes[m - 1 - i] = x;
        rule.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
    return cache.emplace(m, std::move(rule)).first->second;
}

// integral of f over [a, b] with an m-node rule
inline double gauss_legendre_integrate(const std::function<double(double)>& f, double a,
                                       double b, int m) {
    const auto& rule = gauss_legendre(m);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    NeumaierSum acc;
    for (int i = 0; i < m; ++i) acc.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
    return acc.value() * half;
}

// integral of x^n * P(x) over the support, exact per piece; n = 0 gives the
// total probability mass
inline double law_moment_quadrature(const ExactLaw& law, int n) {
    if (law.is_point_mass()) return std::pow(law.point_mass().location, n);
    const auto& vals = law.spectrum().values();
    const int d = law.spectrum().dimension();
    const int deg = (d - 2) + n;
    const int m = deg / 2 + 1;
    NeumaierSum acc;
    for (size_t j = 0; j + 1 < vals.size(); ++j) {
        acc.add(gauss_legendre_integrate(
            [&](double x) { return std::pow(x, n) * density(law, x); }, vals[j],
            vals[j + 1], m));
    }
    return acc.value();
}

} // namespace haarlaw
