/*
 * sampling.hpp — Haar Monte Carlo draws of A(psi).
 *
 * A Haar-random pure state is a vector of d i.i.d. standard complex Gaussians
 * normalized to the unit sphere, so a draw of <psi|A|psi> is the convex
 * combination sum_j a_j w_j with w_j = (block sum of |z_i|^2) / ||z||^2.
 *
 * Randomness is counter-based: draw i derives its own splitmix64 stream from
 * (seed, i), so output is identical however draws are distributed over
 * workers, and normals come from an explicit Box-Muller so the stream does not
 * depend on the standard library's distribution internals.
 */

#pragma once

#include "haarlaw/errors.hpp"
#include "haarlaw/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace haarlaw {

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// per-draw stream: a keyed splitmix64 whose initial state mixes seed and index
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t index) {
        state_ = seed ^ 0x6A09E667F3BCC909ULL;
        state_ += index * 0x9E3779B97F4A7C15ULL;
        state_ = splitmix64(state_); // decorrelate adjacent indices
    }
    uint64_t next_u64() { return splitmix64(state_); }
    // uniform in (0, 1]
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }
    // standard normal pair, explicit Box-Muller
    void next_normal_pair(double& g0, double& g1) {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        g0 = r * std::cos(2.0 * M_PI * u2);
        g1 = r * std::sin(2.0 * M_PI * u2);
    }

  private:
    uint64_t state_;
};

} // namespace detail

struct SampleSet {
    Spectrum spectrum;
    uint64_t seed = 0;
    std::vector<double> values;

    std::size_t count() const { return values.size(); }
};

// one draw of A(psi); exposed for tests that need custom block assignments
inline double sample_one(const Spectrum& s, uint64_t seed, uint64_t index) {
    detail::CounterRng rng(seed, index);
    const auto& vals = s.values();
    const auto& mult = s.multiplicities();
    double total = 0.0, shifted = 0.0; // sum_j block_j (a_j - a_1)
    const double a1 = vals.front();
    for (std::size_t j = 0; j < vals.size(); ++j) {
        double block = 0.0;
        for (int i = 0; i < mult[j]; ++i) {
            double re, im; // one complex amplitude per Box-Muller pair
            rng.next_normal_pair(re, im);
            block += re * re + im * im;
        }
        total += block;
        shifted += block * (vals[j] - a1);
    }
    const double draw = a1 + shifted / total;
    return std::clamp(draw, s.min(), s.max());
}

inline SampleSet sample(const Spectrum& s, std::size_t n, uint64_t seed) {
    if (n < 1) throw InvalidArgument("sample: need at least one draw");
    SampleSet out{s, seed, {}};
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = sample_one(s, seed, i);
    return out;
}

} // namespace haarlaw
