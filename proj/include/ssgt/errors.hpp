// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ssgt {

// Filesystem and stream failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data: PLY files, compressed bitstreams, geometry sections.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failures inside the codec itself: numerical pathologies, inconsistent
// coefficient sets, values outside the entropy coder's range.
class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameters (rejected before any work starts).
class ParamError : public CodecError {
public:
    using CodecError::CodecError;
};

}  // namespace ssgt
