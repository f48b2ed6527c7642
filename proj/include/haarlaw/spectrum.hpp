/*
 * spectrum.hpp — observables as spectra.
 *
 * The law of <psi|A|psi> over Haar-random |psi> depends on A only through its
 * eigenvalues and multiplicities, so the whole library consumes a Spectrum:
 * strictly increasing distinct values a_1 < ... < a_l with multiplicities
 * n_1..n_l summing to the Hilbert space dimension d.
 */

#pragma once

#include "haarlaw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace haarlaw {

class Spectrum {
  public:
    Spectrum(std::vector<double> values, std::vector<int> multiplicities)
        : values_(std::move(values)), mult_(std::move(multiplicities)) {
        validate();
        dim_ = std::accumulate(mult_.begin(), mult_.end(), 0);
    }

    const std::vector<double>& values() const { return values_; }
    const std::vector<int>& multiplicities() const { return mult_; }
    int dimension() const { return dim_; }
    int distinct_count() const { return static_cast<int>(values_.size()); }

    double min() const { return values_.front(); }
    double max() const { return values_.back(); }
    double range() const { return values_.back() - values_.front(); }
    double operator_norm() const { return std::max(std::abs(min()), std::abs(max())); }

    bool is_constant() const { return values_.size() == 1; }
    bool is_degenerate() const {
        return std::any_of(mult_.begin(), mult_.end(), [](int n) { return n > 1; });
    }

    // tr(A)/d, the first moment of the law
    double mean() const {
        double s = 0.0;
        for (size_t j = 0; j < values_.size(); ++j) s += values_[j] * mult_[j];
        return s / dim_;
    }

    // p_r = sum_j n_j a_j^r
    double power_sum(int r) const {
        double s = 0.0;
        for (size_t j = 0; j < values_.size(); ++j) s += mult_[j] * std::pow(values_[j], r);
        return s;
    }

    friend bool operator==(const Spectrum& a, const Spectrum& b) {
        return a.values_ == b.values_ && a.mult_ == b.mult_;
    }

  private:
    void validate() const {
        if (values_.empty() || values_.size() != mult_.size())
            throw InvalidSpectrum("spectrum: need matching nonempty value/multiplicity lists");
        for (double v : values_)
            if (!std::isfinite(v)) throw InvalidSpectrum("spectrum: non-finite eigenvalue");
        for (size_t j = 0; j + 1 < values_.size(); ++j)
            if (!(values_[j] < values_[j + 1]))
                throw InvalidSpectrum("spectrum: values must be strictly increasing");
        for (int n : mult_)
            if (n < 1) throw InvalidSpectrum("spectrum: multiplicities must be >= 1");
    }

    std::vector<double> values_;
    std::vector<int> mult_;
    int dim_ = 0;
};

inline constexpr double kDefaultClusterTol = 1e-12;

// Cluster raw (value, multiplicity) pairs whose gaps are below
// tol * spectral range (absolute tol when the range is zero); each cluster
// collapses to its multiplicity-weighted mean.  Single-linkage on adjacent
// gaps of the sorted list, so the result is order-independent and idempotent:
// merged cluster means stay separated by more than the threshold.
inline Spectrum build_spectrum_weighted(std::vector<std::pair<double, int>> raw,
                                        double cluster_tol = kDefaultClusterTol) {
    if (raw.empty()) throw InvalidSpectrum("build_spectrum: empty eigenvalue list");
    if (cluster_tol < 0.0) throw InvalidSpectrum("build_spectrum: negative tolerance");
    for (const auto& [v, m] : raw) {
        if (!std::isfinite(v)) throw InvalidSpectrum("build_spectrum: non-finite eigenvalue");
        if (m < 1) throw InvalidSpectrum("build_spectrum: multiplicity must be >= 1");
    }
    std::sort(raw.begin(), raw.end());

    const double range = raw.back().first - raw.front().first;
    const double thresh = range > 0.0 ? cluster_tol * range : cluster_tol;

    std::vector<double> values;
    std::vector<int> mult;
    size_t i = 0;
    while (i < raw.size()) {
        size_t j = i;
        while (j + 1 < raw.size() && raw[j + 1].first - raw[j].first <= thresh) ++j;
        double wsum = 0.0;
        long count = 0;
        for (size_t t = i; t <= j; ++t) {
            wsum += raw[t].first * raw[t].second;
            count += raw[t].second;
        }
        // identical members keep their value bit-for-bit (round-trip contract)
        values.push_back(raw[i].first == raw[j].first ? raw[i].first : wsum / count);
        mult.push_back(static_cast<int>(count));
        i = j + 1;
    }
    return Spectrum(std::move(values), std::move(mult));
}

inline Spectrum build_spectrum(const std::vector<double>& raw_eigenvalues,
                               double cluster_tol = kDefaultClusterTol) {
    std::vector<std::pair<double, int>> pairs;
    pairs.reserve(raw_eigenvalues.size());
    for (double v : raw_eigenvalues) pairs.emplace_back(v, 1);
    return build_spectrum_weighted(std::move(pairs), cluster_tol);
}

// Generators for the observables studied in the examples.
struct SpectrumKind {
    enum class Tag { Explicit, Projector, NumberOperator, Power, Log, Constant };
    Tag tag = Tag::NumberOperator;
    int rank = 1;       // projector
    double alpha = 1.0; // power
    double value = 0.0; // constant

    static SpectrumKind projector(int rank) { return {Tag::Projector, rank, 1.0, 0.0}; }
    static SpectrumKind number_operator() { return {Tag::NumberOperator, 1, 1.0, 0.0}; }
    static SpectrumKind power(double alpha) { return {Tag::Power, 1, alpha, 0.0}; }
    static SpectrumKind log() { return {Tag::Log, 1, 1.0, 0.0}; }
    static SpectrumKind constant(double c) { return {Tag::Constant, 1, 1.0, c}; }
};

inline Spectrum generate(const SpectrumKind& kind, int d) {
    if (d < 1) throw InvalidSpectrum("generate: dimension must be >= 1");
    using Tag = SpectrumKind::Tag;
    switch (kind.tag) {
        case Tag::Projector: {
            const int r = kind.rank;
            if (r < 0 || r > d) throw InvalidSpectrum("generate: projector rank outside [0, d]");
            if (r == 0) return Spectrum({0.0}, {d});
            if (r == d) return Spectrum({1.0}, {d});
            return Spectrum({0.0, 1.0}, {d - r, r});
        }
        case Tag::NumberOperator: {
            std::vector<double> v(d);
            for (int k = 1; k <= d; ++k) v[k - 1] = k;
            return Spectrum(std::move(v), std::vector<int>(d, 1));
        }
        case Tag::Power: {
            if (!(kind.alpha > 0.0)) throw InvalidSpectrum("generate: power exponent must be > 0");
            std::vector<double> v(d);
            for (int k = 1; k <= d; ++k) v[k - 1] = std::pow(static_cast<double>(k), kind.alpha);
            return Spectrum(std::move(v), std::vector<int>(d, 1)); // ctor rejects collisions
        }
        case Tag::Log: {
            std::vector<double> v(d);
            for (int k = 1; k <= d; ++k) v[k - 1] = std::log(static_cast<double>(k));
            return Spectrum(std::move(v), std::vector<int>(d, 1));
        }
        case Tag::Constant:
            return Spectrum({kind.value}, {d});
        case Tag::Explicit:
            break;
    }
    throw InvalidSpectrum("generate: explicit spectra come from build_spectrum");
}

} // namespace haarlaw
