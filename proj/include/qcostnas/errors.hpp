// Copyright 2026 The qcostnas authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qcostnas {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad arguments: invalid qubit counts, search points out of range,
/// dimension mismatches, negative counts and the like.
struct InvalidArgumentError : Error {
    using Error::Error;
};

/// A calibration/backend file violates the documented schema.
struct CalibrationFormatError : Error {
    using Error::Error;
};

/// A backend is structurally unusable (e.g. disconnected coupling map).
struct InvalidBackendError : Error {
    using Error::Error;
};

/// No rewrite rule maps a gate to the requested native basis.
struct UnsupportedGateError : Error {
    using Error::Error;
};

/// A gradient was requested for a gate that has no shift rule.
struct UnsupportedGradientError : Error {
    using Error::Error;
};

/// Statevector capacity exceeded.
struct CapacityError : Error {
    using Error::Error;
};

/// p_fail reached the saturation guard; the effective-time inflation
/// would be physically meaningless.
struct ReliabilitySaturatedError : Error {
    using Error::Error;
};

/// A layer stack whose shape arithmetic does not chain.
struct InvalidArchitectureError : Error {
    using Error::Error;
};

/// Filesystem / parse failures outside the calibration schema.
struct IoError : Error {
    using Error::Error;
};

}  // namespace qcostnas
