// Umbrella header: exact distributions of Haar-random quantum expectation
// values, their moments, Monte Carlo validation, and concentration/CLT
// diagnostics.

#pragma once

#include "haarlaw/analysis.hpp"
#include "haarlaw/eft.hpp"
#include "haarlaw/errors.hpp"
#include "haarlaw/io.hpp"
#include "haarlaw/kstest.hpp"
#include "haarlaw/law.hpp"
#include "haarlaw/moments.hpp"
#include "haarlaw/mpreal.hpp"
#include "haarlaw/precision.hpp"
#include "haarlaw/quadrature.hpp"
#include "haarlaw/sampling.hpp"
#include "haarlaw/spectrum.hpp"
