// haarlaw command line: exact laws of Haar-random expectation values,
// moments, Monte Carlo checks, Levy comparisons, and CLT diagnostics.
//
// Exit codes: 0 success, 2 invalid input, 3 precision policy exceeded.

#include "haarlaw/haarlaw.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace haarlaw;
using nlohmann::json;

struct SpectrumOpts {
    std::string file;
    std::string kind;
    int dim = 0;
    int rank = 1;
    double alpha = 1.0;
    double value = 0.0;
    double cluster_tol = kDefaultClusterTol;
};

struct OutputOpts {
    std::string path;   // empty = stdout
    std::string format = "csv";
};

void add_spectrum_flags(CLI::App* cmd, SpectrumOpts& so) {
    cmd->add_option("--spectrum", so.file, "spectrum file (.json or .csv)");
    cmd->add_option("--generate", so.kind,
                    "generator: projector | number-operator | power | log | constant");
    cmd->add_option("--dim", so.dim, "Hilbert space dimension for --generate");
    cmd->add_option("--rank", so.rank, "projector rank (default 1)");
    cmd->add_option("--alpha", so.alpha, "power-law exponent (default 1)");
    cmd->add_option("--value", so.value, "constant eigenvalue");
    cmd->add_option("--cluster-tol", so.cluster_tol,
                    "degeneracy clustering tolerance, relative to range");
}

void add_output_flags(CLI::App* cmd, OutputOpts& oo) {
    cmd->add_option("--out", oo.path, "output path (default: stdout)");
    cmd->add_option("--format", oo.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
}

Spectrum resolve_spectrum(const SpectrumOpts& so) {
    if (!so.file.empty()) return read_spectrum_file(so.file, so.cluster_tol);
    if (so.kind.empty())
        throw InvalidArgument("need --spectrum <path> or --generate <kind> --dim d");
    if (so.dim < 1) throw InvalidArgument("--generate needs --dim >= 1");
    if (so.kind == "projector") return generate(SpectrumKind::projector(so.rank), so.dim);
    if (so.kind == "number-operator")
        return generate(SpectrumKind::number_operator(), so.dim);
    if (so.kind == "power") return generate(SpectrumKind::power(so.alpha), so.dim);
    if (so.kind == "log") return generate(SpectrumKind::log(), so.dim);
    if (so.kind == "constant") return generate(SpectrumKind::constant(so.value), so.dim);
    throw InvalidArgument("unknown generator: " + so.kind);
}

PrecisionPolicy parse_precision(const std::string& text) {
    if (text.empty()) return PrecisionPolicy::automatic();
    if (text == "fast") return PrecisionPolicy::fast_float();
    if (text == "compensated") return PrecisionPolicy::compensated();
    if (text == "high") return PrecisionPolicy::high_precision();
    if (text.rfind("high:", 0) == 0) {
        const long bits = std::stol(text.substr(5));
        return PrecisionPolicy::high_precision(static_cast<mpfr_prec_t>(bits));
    }
    throw InvalidArgument("bad --precision: " + text +
                          " (want fast | compensated | high:<bits>)");
}

struct Grid {
    double lo = 0.0, hi = 1.0;
    int n = 1001;
};

Grid parse_grid(const std::string& text, Grid fallback) {
    if (text.empty()) return fallback;
    Grid g;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw InvalidArgument("bad --grid, want min:max:n");
    try {
        g.lo = std::stod(text.substr(0, c1));
        g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        g.n = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw InvalidArgument("bad --grid, want min:max:n");
    }
    if (g.n < 2 || !(g.lo < g.hi)) throw InvalidArgument("bad --grid: need n >= 2, min < max");
    return g;
}

std::vector<double> grid_points(const Grid& g) {
    std::vector<double> xs(g.n);
    for (int i = 0; i < g.n; ++i)
        xs[i] = g.lo + (g.hi - g.lo) * static_cast<double>(i) / (g.n - 1);
    return xs;
}

// default x grid over the support, nudged inward so the sign(0) boundary
// convention does not touch plotted endpoints
Grid default_support_grid(const Spectrum& s) {
    const double nudge = 1e-12 * s.range();
    return Grid{s.min() + nudge, s.max() - nudge, 1001};
}

void emit(const OutputOpts& oo, const std::string& text) {
    if (oo.path.empty())
        std::cout << text;
    else
        write_text_file(oo.path, text);
}

void emit_grid(const OutputOpts& oo, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& cols) {
    if (oo.format == "json")
        emit(oo, grid_to_json(header, cols).dump(2) + "\n");
    else
        emit(oo, grid_to_csv(header, cols));
}

std::vector<int> parse_dims(const std::string& text, std::vector<int> fallback) {
    if (text.empty()) return fallback;
    std::vector<int> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ','))
        if (!cur.empty()) out.push_back(std::stoi(cur));
    if (out.empty()) throw InvalidArgument("bad --dims list");
    return out;
}

bool is_rank1_projector(const Spectrum& s) {
    return s.distinct_count() == 2 && s.values()[0] == 0.0 && s.values()[1] == 1.0 &&
           s.multiplicities()[1] == 1;
}

bool is_number_operator(const Spectrum& s) {
    if (s.is_degenerate()) return false;
    for (size_t k = 0; k < s.values().size(); ++k)
        if (s.values()[k] != static_cast<double>(k + 1)) return false;
    return true;
}

int run(int argc, char** argv) {
    CLI::App app{"exact distribution engine for Haar-random quantum expectation values"};
    app.require_subcommand(1);

    SpectrumOpts so;
    OutputOpts oo;
    std::string precision_text, grid_text, dims_text;
    uint64_t seed = 1;
    std::size_t n_samples = 100000;
    int n_max = 4;
    int grid_pts = 201;
    std::string input_path, omega_text = "0,10,-10";

    auto* c_density = app.add_subcommand("density", "density grid P(x)");
    auto* c_cdf = app.add_subcommand("cdf", "cumulative distribution grid");
    auto* c_charfn = app.add_subcommand("charfn", "characteristic function grid");
    auto* c_moments = app.add_subcommand("moments", "moment/cumulant report, all routes");
    auto* c_sample = app.add_subcommand("sample", "Haar Monte Carlo draws of A(psi)");
    auto* c_kstest = app.add_subcommand("kstest", "KS agreement of samples vs exact CDF");
    auto* c_levy = app.add_subcommand("levy", "exact tails vs Levy bound");
    auto* c_clt = app.add_subcommand("clt", "CLT diagnostics over a dimension sweep");
    auto* c_ident = app.add_subcommand("identities", "residue identity checks");
    auto* c_fig1 = app.add_subcommand("fig1", "density grids for a_k = k/d sweeps");
    auto* c_fig2 = app.add_subcommand("fig2", "rescaled densities vs standard normal");

    for (auto* c : {c_density, c_cdf, c_charfn, c_moments, c_sample, c_kstest, c_levy,
                    c_ident}) {
        add_spectrum_flags(c, so);
        c->add_option("--precision", precision_text, "fast | compensated | high:<bits>");
    }
    for (auto* c : {c_density, c_cdf, c_charfn, c_sample, c_kstest, c_levy, c_clt, c_ident,
                    c_fig1, c_fig2, c_moments})
        add_output_flags(c, oo);
    for (auto* c : {c_density, c_cdf, c_charfn, c_levy})
        c->add_option("--grid", grid_text, "evaluation grid min:max:n");
    c_moments->add_option("--nmax", n_max, "highest moment order (default 4)");
    c_sample->add_option("--samples", n_samples, "number of draws");
    c_sample->add_option("--seed", seed, "RNG seed");
    c_kstest->add_option("--samples", n_samples, "number of draws");
    c_kstest->add_option("--seed", seed, "RNG seed");
    c_kstest->add_option("--input", input_path, "sample CSV written by `sample`");
    c_ident->add_option("--omega", omega_text, "comma list of shift values");
    c_clt->add_option("--kind", so.kind, "power | log");
    c_clt->add_option("--alpha", so.alpha, "power exponent");
    c_clt->add_option("--dims", dims_text, "comma list of dimensions");
    c_clt->add_option("--grid-points", grid_pts, "points per rescaled density (0 = none)");
    c_clt->add_option("--precision", precision_text, "fast | compensated | high:<bits>");
    c_fig1->add_option("--dims", dims_text, "comma list of dimensions (default 3,5,9,17)");
    c_fig2->add_option("--dims", dims_text, "comma list of dimensions (default 4,8,16,32)");
    c_fig2->add_option("--grid-points", grid_pts, "points per rescaled density");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    try {
        const PrecisionPolicy policy = parse_precision(precision_text);

        if (c_density->parsed() || c_cdf->parsed()) {
            const Spectrum s = resolve_spectrum(so);
            const auto law = compile_law(s, policy);
            const Grid g = parse_grid(grid_text, default_support_grid(s));
            const auto xs = grid_points(g);
            std::vector<double> ys(xs.size());
            const bool want_cdf = c_cdf->parsed();
            for (size_t i = 0; i < xs.size(); ++i)
                ys[i] = want_cdf ? cdf(law, xs[i]) : density(law, xs[i]);
            emit_grid(oo, {"x", want_cdf ? "cdf" : "density"}, {xs, ys});
            return 0;
        }
        if (c_charfn->parsed()) {
            const Spectrum s = resolve_spectrum(so);
            const auto law = compile_law(s, policy);
            const double r = s.range() > 0 ? s.range() : 1.0;
            const Grid g = parse_grid(grid_text, Grid{-40.0 / r, 40.0 / r, 1001});
            const auto ls = grid_points(g);
            std::vector<double> re(ls.size()), im(ls.size());
            for (size_t i = 0; i < ls.size(); ++i) {
                const auto chi = char_fn(law, ls[i]);
                re[i] = chi.real();
                im[i] = chi.imag();
            }
            emit_grid(oo, {"lambda", "re", "im"}, {ls, re, im});
            return 0;
        }
        if (c_moments->parsed()) {
            const Spectrum s = resolve_spectrum(so);
            if (n_max < 1) throw InvalidArgument("--nmax must be >= 1");
            json routes;
            const int n_perm = std::min(n_max, 6);
            const auto perm = moments_permutation(s, n_perm);
            routes["permutation"] = moment_report_to_json(perm);
            if (!s.is_degenerate())
                routes["compact"] = moment_report_to_json(moments_compact(s, n_max));
            const auto law = compile_law(s, policy);
            if (!law.is_point_mass())
                routes["quadrature"] =
                    moment_report_to_json(moments_quadrature(law, n_max));
            if (is_rank1_projector(s))
                routes["fidelity"] =
                    moment_report_to_json(moments_fidelity(s.dimension(), n_max));
            json out{{"spectrum", spectrum_to_json(s)},
                     {"dimension", s.dimension()},
                     {"routes", routes}};
            emit(oo, out.dump(2) + "\n");
            return 0;
        }
        if (c_sample->parsed()) {
            const Spectrum s = resolve_spectrum(so);
            const SampleSet draws = sample(s, n_samples, seed);
            if (oo.path.empty())
                throw InvalidArgument("sample: --out <path.csv> is required");
            write_sample_set(oo.path, draws);
            return 0;
        }
        if (c_kstest->parsed()) {
            SampleSet draws = input_path.empty()
                                  ? sample(resolve_spectrum(so), n_samples, seed)
                                  : read_sample_set(input_path);
            const auto law = compile_law(draws.spectrum, policy);
            const GoFReport rep = ks_test(draws, law);
            emit(oo, gof_report_to_json(rep).dump(2) + "\n");
            return 0;
        }
        if (c_levy->parsed()) {
            const Spectrum s = resolve_spectrum(so);
            std::vector<double> eps;
            if (grid_text.empty()) {
                const auto mom = moments_permutation(s, 3);
                const double sd = std::sqrt(std::max(mom.kappa[1], 1e-300));
                Grid g{sd / 100.0, 3.0 * sd, 120};
                eps = grid_points(g);
            } else {
                eps = grid_points(parse_grid(grid_text, Grid{}));
            }
            const ConcentrationReport rep =
                is_number_operator(s) ? number_operator_tail(s.dimension(), eps, policy)
                                      : levy_compare(s, eps, policy);
            emit(oo, concentration_report_to_json(rep).dump(2) + "\n");
            return 0;
        }
        if (c_clt->parsed()) {
            SpectrumKind kind;
            if (so.kind == "power")
                kind = SpectrumKind::power(so.alpha);
            else if (so.kind == "log")
                kind = SpectrumKind::log();
            else
                throw InvalidArgument("clt: --kind must be power or log");
            const auto dims = parse_dims(dims_text, {8, 16, 32, 64});
            const CLTReport rep = clt_diagnostics(kind, dims, grid_pts, policy);
            if (oo.format == "json" || grid_pts < 2) {
                emit(oo, clt_report_to_json(rep, grid_pts > 1).dump(2) + "\n");
            } else {
                std::vector<double> dcol, z, pz, nrm;
                for (const auto& p : rep.points)
                    for (size_t i = 0; i < p.z.size(); ++i) {
                        dcol.push_back(p.d);
                        z.push_back(p.z[i]);
                        pz.push_back(p.pz[i]);
                        nrm.push_back(p.normal[i]);
                    }
                emit_grid(oo, {"d", "z", "pz", "normal"}, {dcol, z, pz, nrm});
            }
            return 0;
        }
        if (c_ident->parsed()) {
            const Spectrum s = resolve_spectrum(so);
            std::vector<double> omegas;
            std::istringstream in(omega_text);
            std::string tok;
            while (std::getline(in, tok, ','))
                if (!tok.empty()) omegas.push_back(std::stod(tok));
            json rows = json::array();
            double worst = 0.0;
            for (double om : omegas) {
                for (int n = 0; n <= s.dimension() - 1; ++n) {
                    const double v = identity_check(s, om, n);
                    const double expected = n == s.dimension() - 1 ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(v - expected));
                    rows.push_back({{"omega", om}, {"n", n}, {"value", v},
                                    {"expected", expected}});
                }
            }
            emit(oo, json{{"checks", rows}, {"max_abs_deviation", worst}}.dump(2) + "\n");
            return 0;
        }
        if (c_fig1->parsed()) {
            const auto dims = parse_dims(dims_text, {3, 5, 9, 17});
            std::vector<double> dcol, xs, ps;
            for (int d : dims) {
                std::vector<double> vals(d);
                for (int k = 1; k <= d; ++k) vals[k - 1] = static_cast<double>(k) / d;
                const Spectrum s = build_spectrum(vals, 0.0);
                const auto law = compile_law(s);
                const Grid g = default_support_grid(s);
                for (double x : grid_points(g)) {
                    dcol.push_back(d);
                    xs.push_back(x);
                    ps.push_back(density(law, x));
                }
            }
            emit_grid(oo, {"d", "x", "density"}, {dcol, xs, ps});
            return 0;
        }
        if (c_fig2->parsed()) {
            const auto dims = parse_dims(dims_text, {4, 8, 16, 32});
            std::vector<double> kindcol, dcol, z, pz, nrm;
            int kind_id = 0;
            for (const auto& kind : {SpectrumKind::power(2.0), SpectrumKind::log()}) {
                const CLTReport rep = clt_diagnostics(kind, dims, grid_pts);
                for (const auto& p : rep.points)
                    for (size_t i = 0; i < p.z.size(); ++i) {
                        kindcol.push_back(kind_id);
                        dcol.push_back(p.d);
                        z.push_back(p.z[i]);
                        pz.push_back(p.pz[i]);
                        nrm.push_back(p.normal[i]);
                    }
                ++kind_id;
            }
            emit_grid(oo, {"kind", "d", "z", "pz", "normal"},
                      {kindcol, dcol, z, pz, nrm});
            return 0;
        }
        return 2;
    } catch (const PrecisionExceeded& e) {
        std::cerr << "precision exceeded: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
