#pragma once

#include <stdexcept>
#include <string>

namespace haarlaw {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// construction-time rejection of bad spectra (empty, non-finite, colliding)
struct InvalidSpectrum : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

// the requested precision mode cannot deliver the target accuracy
struct PrecisionExceeded : Error {
    using Error::Error;
};

// density of a point mass does not exist as a function
struct NoDensity : Error {
    using Error::Error;
};

struct RequiresNonDegenerate : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

struct DegenerateLaw : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace haarlaw
