/*
   Copyright 2026 The brwlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace brw {

enum class ErrorKind {
    OutOfRegime,
    DomainError,
    DegenerateBand,
    BudgetExceeded,
    PreconditionViolated,
    EmptyWindow,
    Extinct,
    MomentConditionFailed,
    ConfigError,
    IoError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library. `subject` carries the name of the
/// violated constraint, the offending generation, etc. when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string subject = {})
        : std::runtime_error(message), kind_(kind), subject_(std::move(subject))
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorKind kind_;
    std::string subject_;
};

} // namespace brw
