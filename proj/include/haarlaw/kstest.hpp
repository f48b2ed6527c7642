/*
 * kstest.hpp — Kolmogorov-Smirnov agreement between Haar samples and the
 * exact CDF.  sqrt(N) * D_N is compared against the asymptotic 1% critical
 * value 1.63.
 */

#pragma once

#include "haarlaw/law.hpp"
#include "haarlaw/moments.hpp"
#include "haarlaw/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace haarlaw {

inline constexpr double kKsCritical1Percent = 1.63;

struct GoFReport {
    double ks_statistic = 0.0; // D_N
    double scaled_statistic = 0.0; // sqrt(N) * D_N
    std::size_t n = 0;
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    double exact_mean = 0.0;
    double exact_variance = 0.0;

    bool accepts_1pct() const { return scaled_statistic < kKsCritical1Percent; }
};

// D_N = sup_x |F_N(x) - F(x)| over the sorted sample, both one-sided gaps.
// No metadata check: callers may deliberately test against a foreign law.
inline double ks_statistic(std::span<const double> samples, const ExactLaw& law) {
    if (samples.empty()) throw InvalidArgument("ks_statistic: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    if (law.is_point_mass()) {
        // the exact CDF is a step, so compare jump-by-jump over distinct
        // sample values using left limits (the usual formula assumes no ties)
        const double c = law.point_mass().location;
        std::size_t i = 0;
        while (i < sorted.size()) {
            const double v = sorted[i];
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == v) ++j;
            const double f_left = v <= c ? 0.0 : 1.0;  // F(v-)
            const double f_right = v < c ? 0.0 : 1.0;  // F(v)
            d = std::max({d, std::abs(i / n - f_left), std::abs(j / n - f_right)});
            i = j;
        }
        return d;
    }
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(law, sorted[i]);
        d = std::max(d, std::max((i + 1.0) / n - f, f - i / n));
    }
    return d;
}

inline GoFReport ks_test(const SampleSet& samples, const ExactLaw& law) {
    if (!(samples.spectrum == law.spectrum()))
        throw InvalidArgument("ks_test: sample set and law come from different spectra");
    GoFReport r;
    r.n = samples.count();
    r.ks_statistic = ks_statistic(samples.values, law);
    r.scaled_statistic = std::sqrt(static_cast<double>(r.n)) * r.ks_statistic;
    NeumaierSum acc;
    for (double v : samples.values) acc.add(v);
    r.sample_mean = acc.value() / static_cast<double>(r.n);
    NeumaierSum var;
    for (double v : samples.values) {
        const double c = v - r.sample_mean;
        var.add(c * c);
    }
    r.sample_variance = r.n > 1 ? var.value() / static_cast<double>(r.n - 1) : 0.0;
    const auto mom = moments_permutation(samples.spectrum, 3);
    r.exact_mean = mom.kappa[0];
    r.exact_variance = mom.kappa[1];
    return r;
}

} // namespace haarlaw
