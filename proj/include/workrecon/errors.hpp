// Copyright 2026 The workrecon authors
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

namespace workrecon {

// Bad inputs, broken preconditions, malformed configuration. CLI exit code 2.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Numerical failures: non-convergence, unbalanceable matrices, degenerate fits. CLI exit code 3.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string &msg) : std::runtime_error(msg) {}
};

// File system and parse failures. CLI exit code 4.
struct io_error : std::runtime_error {
    explicit io_error(const std::string &msg) : std::runtime_error(msg) {}
};

}  // namespace workrecon
