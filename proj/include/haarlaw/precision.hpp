/*
 * precision.hpp — evaluation precision policy.
 *
 * The closed-form laws are alternating sums whose terms can dwarf the result
 * by hundreds of orders of magnitude, so every kernel runs under a policy:
 * which arithmetic to use (plain compensated doubles, double-double, or MPFR
 * at a given bit count), whether to escalate automatically when the running
 * cancellation estimate says the mode cannot reach the accuracy target, and
 * where the characteristic/moment-generating functions switch from the
 * residue closed form to the Taylor (moment) series.
 */

#pragma once

#include "haarlaw/errors.hpp"

#include <mpfr.h>

#include <vector>

namespace haarlaw {

enum class PrecisionMode { FastFloat, Compensated, HighPrecision };

struct PrecisionPolicy {
    PrecisionMode mode = PrecisionMode::FastFloat;
    mpfr_prec_t bits = 256; // used by HighPrecision
    double taylor_switch_radius = 1.0;
    // accuracy target for the cancellation estimate; evaluation either meets
    // it, escalates (if allowed), or throws PrecisionExceeded
    double target_rel_error = 1e-11;
    bool escalate = true;

    static PrecisionPolicy fast_float(bool escalate = false) {
        PrecisionPolicy p;
        p.mode = PrecisionMode::FastFloat;
        p.escalate = escalate;
        return p;
    }
    static PrecisionPolicy compensated(bool escalate = false) {
        PrecisionPolicy p;
        p.mode = PrecisionMode::Compensated;
        p.escalate = escalate;
        return p;
    }
    static PrecisionPolicy high_precision(mpfr_prec_t bits = 256, bool escalate = false) {
        PrecisionPolicy p;
        p.mode = PrecisionMode::HighPrecision;
        p.bits = bits;
        p.escalate = escalate;
        p.validate();
        return p;
    }
    // the default: start cheap, escalate until the target is met
    static PrecisionPolicy automatic() {
        PrecisionPolicy p;
        p.escalate = true;
        return p;
    }

    void validate() const {
        if (mode == PrecisionMode::HighPrecision && bits < 64)
            throw InvalidArgument("precision: high_precision needs >= 64 bits");
        if (!(taylor_switch_radius > 0.0))
            throw InvalidArgument("precision: taylor_switch_radius must be > 0");
    }
};

namespace detail {

inline constexpr mpfr_prec_t kMaxEscalationBits = 1 << 15;

// One rung of the escalation ladder: HighPrecision rungs carry a bit count.
struct EvalMode {
    PrecisionMode mode;
    mpfr_prec_t bits; // meaningful for HighPrecision only
};

inline std::vector<EvalMode> escalation_ladder(const PrecisionPolicy& p) {
    std::vector<EvalMode> rungs;
    switch (p.mode) {
        case PrecisionMode::FastFloat:
            rungs.push_back({PrecisionMode::FastFloat, 0});
            if (p.escalate) rungs.push_back({PrecisionMode::Compensated, 0});
            break;
        case PrecisionMode::Compensated:
            rungs.push_back({PrecisionMode::Compensated, 0});
            break;
        case PrecisionMode::HighPrecision:
            break;
    }
    mpfr_prec_t start = p.mode == PrecisionMode::HighPrecision ? p.bits : 256;
    if (p.mode == PrecisionMode::HighPrecision || p.escalate) {
        for (mpfr_prec_t b = start; b <= kMaxEscalationBits; b *= 2) {
            rungs.push_back({PrecisionMode::HighPrecision, b});
            if (!p.escalate) break;
        }
    }
    return rungs;
}

} // namespace detail

} // namespace haarlaw
