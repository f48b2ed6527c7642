/*
 * io.hpp — file formats and report serialization.
 *
 * Spectrum files: JSON {"eigenvalues":[{"value": v, "multiplicity": m}, ...]}
 * or flat CSV value,multiplicity lines.  Sample sets: single-column CSV plus a
 * JSON sidecar {seed, N, spectrum}.  Grid CSVs carry a header row and floats
 * with 17 significant digits so values round-trip bit-exactly.
 */

#pragma once

#include "haarlaw/analysis.hpp"
#include "haarlaw/errors.hpp"
#include "haarlaw/kstest.hpp"
#include "haarlaw/moments.hpp"
#include "haarlaw/sampling.hpp"
#include "haarlaw/spectrum.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace haarlaw {

using nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- spectrum files ------------------------------------------------------

inline json spectrum_to_json(const Spectrum& s) {
    json eig = json::array();
    for (size_t j = 0; j < s.values().size(); ++j)
        eig.push_back({{"value", s.values()[j]}, {"multiplicity", s.multiplicities()[j]}});
    return json{{"eigenvalues", eig}};
}

inline Spectrum spectrum_from_json(const json& j, double cluster_tol = kDefaultClusterTol) {
    if (!j.contains("eigenvalues") || !j["eigenvalues"].is_array() || j["eigenvalues"].empty())
        throw IoError("spectrum json: need a nonempty \"eigenvalues\" array");
    std::vector<std::pair<double, int>> raw;
    for (const auto& e : j["eigenvalues"]) {
        if (!e.contains("value") || !e.contains("multiplicity"))
            throw IoError("spectrum json: entries need value and multiplicity");
        raw.emplace_back(e["value"].get<double>(), e["multiplicity"].get<int>());
    }
    return build_spectrum_weighted(std::move(raw), cluster_tol);
}

inline std::string spectrum_to_csv(const Spectrum& s) {
    std::ostringstream out;
    out << "value,multiplicity\n";
    for (size_t j = 0; j < s.values().size(); ++j)
        out << format_double(s.values()[j]) << ',' << s.multiplicities()[j] << '\n';
    return out.str();
}

inline Spectrum spectrum_from_csv(const std::string& text,
                                  double cluster_tol = kDefaultClusterTol) {
    std::istringstream in(text);
    std::vector<std::pair<double, int>> raw;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("value", 0) == 0) continue; // optional header
        const auto comma = line.find(',');
        try {
            const double v = std::stod(line.substr(0, comma));
            const int m = comma == std::string::npos ? 1 : std::stoi(line.substr(comma + 1));
            raw.emplace_back(v, m);
        } catch (const std::exception&) {
            throw IoError("spectrum csv: bad line: " + line);
        }
    }
    if (raw.empty()) throw IoError("spectrum csv: no rows");
    return build_spectrum_weighted(std::move(raw), cluster_tol);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

inline bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

inline Spectrum read_spectrum_file(const std::string& path,
                                   double cluster_tol = kDefaultClusterTol) {
    const std::string text = read_text_file(path);
    if (has_suffix(path, ".json")) {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw IoError("bad json in " + path);
        return spectrum_from_json(j, cluster_tol);
    }
    return spectrum_from_csv(text, cluster_tol);
}

inline void write_spectrum_file(const std::string& path, const Spectrum& s) {
    if (has_suffix(path, ".json"))
        write_text_file(path, spectrum_to_json(s).dump(2) + "\n");
    else
        write_text_file(path, spectrum_to_csv(s));
}

// ---- sample sets ---------------------------------------------------------

inline void write_sample_set(const std::string& csv_path, const SampleSet& samples) {
    std::ostringstream out;
    out << "value\n";
    for (double v : samples.values) out << format_double(v) << '\n';
    write_text_file(csv_path, out.str());
    json sidecar{{"seed", samples.seed},
                 {"N", samples.count()},
                 {"spectrum", spectrum_to_json(samples.spectrum)}};
    write_text_file(csv_path + ".json", sidecar.dump(2) + "\n");
}

inline SampleSet read_sample_set(const std::string& csv_path) {
    json sidecar = json::parse(read_text_file(csv_path + ".json"), nullptr, false);
    if (sidecar.is_discarded() || !sidecar.contains("spectrum") || !sidecar.contains("seed"))
        throw IoError("sample sidecar missing or malformed: " + csv_path + ".json");
    SampleSet out{spectrum_from_json(sidecar["spectrum"]), sidecar["seed"].get<uint64_t>(), {}};
    std::istringstream in(read_text_file(csv_path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "value") continue;
        try {
            out.values.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw IoError("sample csv: bad line: " + line);
        }
    }
    if (out.values.empty()) throw IoError("sample csv: no rows in " + csv_path);
    if (sidecar.contains("N") && sidecar["N"].get<size_t>() != out.values.size())
        throw IoError("sample csv: row count disagrees with sidecar N");
    return out;
}

// ---- grids and reports ---------------------------------------------------

// columns.size() row vectors of equal length
inline std::string grid_to_csv(const std::vector<std::string>& header,
                               const std::vector<std::vector<double>>& columns) {
    std::ostringstream out;
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    const size_t rows = columns.empty() ? 0 : columns.front().size();
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_double(columns[c][r]);
        out << '\n';
    }
    return out.str();
}

inline json grid_to_json(const std::vector<std::string>& header,
                         const std::vector<std::vector<double>>& columns) {
    json j;
    for (size_t c = 0; c < header.size(); ++c) j[header[c]] = columns[c];
    return j;
}

inline json moment_report_to_json(const MomentReport& r) {
    json j{{"n_max", r.n_max}, {"method", to_string(r.method)}, {"moments", r.m}};
    if (r.n_max >= 3)
        j["cumulants"] = {{"kappa1", r.kappa[0]}, {"kappa2", r.kappa[1]}, {"kappa3", r.kappa[2]}};
    return j;
}

inline json gof_report_to_json(const GoFReport& r) {
    return json{{"ks_statistic", r.ks_statistic},
                {"scaled_statistic", r.scaled_statistic},
                {"N", r.n},
                {"sample_mean", r.sample_mean},
                {"sample_variance", r.sample_variance},
                {"exact_mean", r.exact_mean},
                {"exact_variance", r.exact_variance},
                {"critical_1pct", kKsCritical1Percent},
                {"accepts_1pct", r.accepts_1pct()}};
}

inline json line_fit_to_json(const LineFit& f) {
    return json{{"slope", f.slope}, {"intercept", f.intercept}, {"points", f.points}};
}

inline json concentration_report_to_json(const ConcentrationReport& r) {
    json j{{"epsilon", r.epsilon},
           {"exact_tail", r.exact_tail},
           {"levy_bound", r.levy_bound},
           {"eta", r.eta},
           {"C1", r.c1},
           {"exp_constant", r.exp_constant},
           {"dominance_violations", r.dominance_violations}};
    if (r.exact_fit) j["exact_fit"] = line_fit_to_json(*r.exact_fit);
    if (r.bound_fit) j["bound_fit"] = line_fit_to_json(*r.bound_fit);
    if (r.fitted_c) {
        j["fitted_alpha"] = *r.fitted_alpha;
        j["fitted_C"] = *r.fitted_c;
        j["reference_C"] = *r.reference_c;
        j["levy_C_prime"] = *r.levy_c_prime;
    }
    return j;
}

inline json clt_report_to_json(const CLTReport& r, bool include_grids = false) {
    json pts = json::array();
    for (const auto& p : r.points) {
        json jp{{"d", p.d},
                {"kappa2", p.kappa2},
                {"kappa3", p.kappa3},
                {"kappa3_z", p.kappa3_z},
                {"supnorm_gap", p.supnorm_gap}};
        if (include_grids) {
            jp["z"] = p.z;
            jp["pz"] = p.pz;
            jp["normal"] = p.normal;
        }
        pts.push_back(std::move(jp));
    }
    return json{{"kind", r.kind},
                {"alpha", r.alpha},
                {"d_grid", r.d_grid},
                {"points", pts},
                {"kappa3z_slope", line_fit_to_json(r.kappa3z_slope)}};
}

} // namespace haarlaw
