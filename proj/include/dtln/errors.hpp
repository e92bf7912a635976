// Copyright 2026  dtln-cpp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DTLN_ERRORS_HPP
#define DTLN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dtln {

// Base error for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or unsupported audio input (WAV parsing, sample-rate checks, ...).
struct AudioError : Error {
    explicit AudioError(const std::string& msg) : Error(msg) {}
};

// Shape or length mismatch between numeric operands.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Weight-file problems, each kind distinguishable by callers.
struct WeightsError : Error {
    enum class Kind { NotAWeightFile, VersionMismatch, ShapeMismatch, Truncated, Io };
    WeightsError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
    Kind kind;
};

}  // namespace dtln

#endif  // DTLN_ERRORS_HPP
