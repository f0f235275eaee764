#pragma once

#include <stdexcept>
#include <string>

namespace spectralfdr {

// Input files that cannot be read or parsed (CLI exit code 3).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Failures inside the numerics: factorization breakdown, evaluation outside
// the legal domain of a transform, degenerate spectra (CLI exit code 4).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spectralfdr
