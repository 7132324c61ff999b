#pragma once

#include <stdexcept>
#include <string>

namespace tsbow {

// Arguments or data violating an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Wavelet name outside the supported family.
class UnsupportedWavelet : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// Malformed, truncated, or version-mismatched files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tsbow
