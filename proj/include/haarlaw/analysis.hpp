/*
 * analysis.hpp — exact tails against Levy's lemma, and CLT diagnostics.
 *
 * Levy bound used here: Prob{f - <f> >= eps} <= 2 exp(-C1 (k+1) eps^2 / eta^2)
 * with C1 = 1/(9 pi^3 ln 2), k+1 = 2d for a d-dimensional complex sphere, and
 * eta = 2 ||A||_op the Lipschitz constant of psi -> <psi|A|psi>.
 *
 * CLT diagnostics rescale to Z = (A - m_1)/sqrt(kappa_2) and track kappa_3(Z)
 * and the sup-norm gap to the standard normal density across dimensions.
 */

#pragma once

#include "haarlaw/kstest.hpp"
#include "haarlaw/law.hpp"
#include "haarlaw/moments.hpp"
#include "haarlaw/quadrature.hpp"
#include "haarlaw/spectrum.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace haarlaw {

inline const double kLevyC1 = 1.0 / (9.0 * M_PI * M_PI * M_PI * M_LN2);
// exponent constants of the two worked tail studies
inline const double kLevyProjectorC = 1.0 / (18.0 * M_PI * M_PI * M_PI * M_LN2); // ~1/387
inline const double kLevyNumberOperatorC = 2.0 / (9.0 * M_PI * M_PI * M_PI * M_LN2); // ~1/97

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

// least squares y = intercept + slope * x
inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit f;
    f.points = xs.size();
    if (xs.size() < 2 || xs.size() != ys.size())
        throw InvalidArgument("fit_line: need >= 2 matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double nn = static_cast<double>(xs.size());
    const double denom = nn * sxx - sx * sx;
    f.slope = (nn * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / nn;
    return f;
}

struct ConcentrationReport {
    std::vector<double> epsilon;
    std::vector<double> exact_tail; // Prob(A - m_1 >= eps)
    std::vector<double> levy_bound; // 2 exp(-C1 2d eps^2 / eta^2)
    double eta = 0.0;               // Lipschitz constant 2 ||A||_op
    double c1 = kLevyC1;
    double exp_constant = 0.0;      // C1 * 2d / eta^2, coefficient of eps^2
    // log-linear least squares on the window where tail is in [1e-12, 0.5]
    std::optional<LineFit> exact_fit;
    std::optional<LineFit> bound_fit;
    std::vector<double> dominance_violations; // eps where exact > bound (+tol)
    // number-operator study extras
    std::optional<double> fitted_alpha; // B ~ alpha e^{-C eps}
    std::optional<double> fitted_c;
    std::optional<double> reference_c;  // 0.25, the reported decay constant
    std::optional<double> levy_c_prime;  // C' = 2/(9 pi^3 ln2)
};

inline ConcentrationReport levy_compare(const Spectrum& s, std::vector<double> eps_grid,
                                        PrecisionPolicy policy = PrecisionPolicy::automatic()) {
    if (s.is_constant()) throw DegenerateLaw("levy_compare: constant spectrum");
    for (double e : eps_grid)
        if (!(e > 0.0)) throw InvalidArgument("levy_compare: eps grid must be positive");
    ConcentrationReport r;
    r.epsilon = std::move(eps_grid);
    r.eta = 2.0 * s.operator_norm();
    const int d = s.dimension();
    r.exp_constant = kLevyC1 * 2.0 * d / (r.eta * r.eta);
    const auto law = compile_law(s, policy);
    const double m1 = s.mean();
    std::vector<double> fit_x, fit_y, bfit_y;
    for (double e : r.epsilon) {
        const double tail = survival(law, m1 + e);
        const double bound = 2.0 * std::exp(-r.exp_constant * e * e);
        r.exact_tail.push_back(tail);
        r.levy_bound.push_back(bound);
        if (bound <= 1.0 && tail > bound + 1e-9) r.dominance_violations.push_back(e);
        if (tail >= 1e-12 && tail <= 0.5) {
            fit_x.push_back(e);
            fit_y.push_back(std::log(tail));
            bfit_y.push_back(std::log(bound));
        }
    }
    if (fit_x.size() >= 2) {
        r.exact_fit = fit_line(fit_x, fit_y);
        r.bound_fit = fit_line(fit_x, bfit_y);
    }
    return r;
}

// B(d, eps) = 1 - cdf((d+1)/2 + eps) for a_k = k, with a log-linear
// alpha e^{-C eps} fit of the tail over eps in [1, 10]
inline ConcentrationReport number_operator_tail(int d, std::vector<double> eps_grid,
                                                PrecisionPolicy policy =
                                                    PrecisionPolicy::automatic()) {
    if (d < 3) throw InvalidArgument("number_operator_tail: need d >= 3");
    const Spectrum s = generate(SpectrumKind::number_operator(), d);
    ConcentrationReport r = levy_compare(s, std::move(eps_grid), policy);
    const auto law = compile_law(s, policy);
    const double m1 = s.mean();
    std::vector<double> xs, ys;
    for (double e = 1.0; e <= 10.0 + 1e-9; e += 0.25) {
        const double tail = survival(law, m1 + e);
        if (tail > 0.0) {
            xs.push_back(e);
            ys.push_back(std::log(tail));
        }
    }
    const LineFit f = fit_line(xs, ys);
    r.fitted_c = -f.slope;
    r.fitted_alpha = std::exp(f.intercept);
    r.reference_c = 0.25;
    r.levy_c_prime = kLevyNumberOperatorC;
    return r;
}

struct CLTPoint {
    int d = 0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    double kappa3_z = 0.0; // kappa3 / kappa2^{3/2}
    std::vector<double> z;       // rescaled grid
    std::vector<double> pz;      // sqrt(kappa2) P(m1 + z sqrt(kappa2))
    std::vector<double> normal;  // standard normal density on the grid
    double supnorm_gap = 0.0;    // sup |pz - normal| over the grid
};

struct CLTReport {
    std::string kind;  // "power" or "log"
    double alpha = 1.0;
    std::vector<int> d_grid;
    std::vector<CLTPoint> points;
    LineFit kappa3z_slope; // log|kappa3(Z)| vs log d
};

inline double standard_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// kind: power(alpha) or log spectra (both non-degenerate by construction);
// grid_points = 0 skips the rescaled-density grids (cumulant scaling only)
inline CLTReport clt_diagnostics(const SpectrumKind& kind, const std::vector<int>& d_grid,
                                 int grid_points = 201,
                                 PrecisionPolicy policy = PrecisionPolicy::automatic()) {
    using Tag = SpectrumKind::Tag;
    if (kind.tag != Tag::Power && kind.tag != Tag::Log)
        throw InvalidArgument("clt_diagnostics: kind must be power(alpha) or log");
    if (d_grid.empty() || d_grid.front() < 4)
        throw InvalidArgument("clt_diagnostics: d grid must be ascending, min >= 4");
    for (size_t i = 0; i + 1 < d_grid.size(); ++i)
        if (d_grid[i] >= d_grid[i + 1])
            throw InvalidArgument("clt_diagnostics: d grid must be ascending");
    CLTReport rep;
    rep.kind = kind.tag == Tag::Power ? "power" : "log";
    rep.alpha = kind.alpha;
    rep.d_grid = d_grid;
    std::vector<double> lx, ly;
    for (int d : d_grid) {
        const Spectrum s = generate(kind, d);
        const auto mom = moments_compact(s, 3);
        CLTPoint pt;
        pt.d = d;
        pt.kappa2 = mom.kappa[1];
        pt.kappa3 = mom.kappa[2];
        pt.kappa3_z = pt.kappa3 / std::pow(pt.kappa2, 1.5);
        if (grid_points > 1) {
            const auto law = compile_law(s, policy);
            const double m1 = mom.kappa[0];
            const double sd = std::sqrt(pt.kappa2);
            const double zlo = std::max(-6.0, (s.min() - m1) / sd);
            const double zhi = std::min(6.0, (s.max() - m1) / sd);
            pt.z.resize(grid_points);
            pt.pz.resize(grid_points);
            pt.normal.resize(grid_points);
            for (int i = 0; i < grid_points; ++i) {
                const double z = zlo + (zhi - zlo) * i / (grid_points - 1);
                pt.z[i] = z;
                pt.pz[i] = sd * density(law, m1 + z * sd);
                pt.normal[i] = standard_normal_pdf(z);
                pt.supnorm_gap = std::max(pt.supnorm_gap, std::abs(pt.pz[i] - pt.normal[i]));
            }
        }
        lx.push_back(std::log(static_cast<double>(d)));
        ly.push_back(std::log(std::abs(pt.kappa3_z)));
        rep.points.push_back(std::move(pt));
    }
    if (lx.size() >= 2) rep.kappa3z_slope = fit_line(lx, ly);
    return rep;
}

} // namespace haarlaw
