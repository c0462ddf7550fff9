// Copyright 2026 The fcmqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace fcmqem {

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorKind {
    invalid_input,  // malformed data, contract violation, bad configuration
    numerical,      // singular matrices, empty mitigated support
};

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {
    }

    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

/// Raised when a calibration matrix is too ill-conditioned to invert exactly.
class SingularMatrixError : public Error {
   public:
    explicit SingularMatrixError(double condition_number)
        : Error(
              ErrorKind::numerical,
              "singular calibration matrix (condition number " + std::to_string(condition_number) + ")"),
          condition_number_(condition_number) {
    }

    double condition_number() const noexcept {
        return condition_number_;
    }

   private:
    double condition_number_;
};

inline Error invalid_input(const std::string &what) {
    return Error(ErrorKind::invalid_input, what);
}

inline Error numerical_error(const std::string &what) {
    return Error(ErrorKind::numerical, what);
}

}  // namespace fcmqem
