// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace proxyisa {

// Base type for every error raised by the engine.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A vector with Euclidean norm below the normalization floor (1e-12).
struct ZeroNormError : Error {
    using Error::Error;
};

// Operands whose dimensions do not line up.
struct DimensionMismatchError : Error {
    using Error::Error;
};

// A loss evaluated on a batch with zero samples.
struct EmptyBatchError : Error {
    using Error::Error;
};

// A pair weight outside (0, inf) handed to the weighted loss.
struct InvalidWeightsError : Error {
    using Error::Error;
};

// A class-state query that needs memory statistics before any exist.
struct InactiveStateError : Error {
    using Error::Error;
};

// An attempt to move a cumulative per-class count backwards.
struct NonMonotoneCountError : Error {
    using Error::Error;
};

// Bad experiment configuration (unknown key, missing key, invalid value).
struct ConfigError : Error {
    using Error::Error;
};

// Parameter/gradient buffers of different sizes in an optimizer step.
struct ShapeMismatchError : Error {
    using Error::Error;
};

// Non-finite loss; the run aborts and dumps state.
struct NumericalDivergenceError : Error {
    using Error::Error;
};

// Malformed input file content; message carries the line number.
struct ParseError : Error {
    using Error::Error;
};

// Filesystem-level failure.
struct IoError : Error {
    using Error::Error;
};

// Too little data for the requested metric.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Synthetic class means could not be separated within the retry budget.
struct InfeasibleSeparationError : Error {
    using Error::Error;
};

}  // namespace proxyisa
