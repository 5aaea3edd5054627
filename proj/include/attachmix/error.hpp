/*
 * Copyright (C) 2026 The attachmix Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace attachmix {

/// Invalid argument or parameter outside the supported regime. CLI exit code 1.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The network cannot supply the requested number of distinct endpoints.
class StructuralError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A likelihood factor or EM denominator is non-positive at the requested alpha.
class EvaluationError : public DomainError {
public:
    EvaluationError(const std::string& what, std::size_t record_index)
        : DomainError(what), record_index_(record_index) {}
    std::size_t record_index() const { return record_index_; }

private:
    std::size_t record_index_;
};

/// The log carries no information about alpha (empty or every record degenerate).
class NoInformationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Malformed input file. Carries the 1-based line number. CLI exit code 1.
class ParseError : public DomainError {
public:
    ParseError(const std::string& what, std::size_t line)
        : DomainError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// File could not be opened, read or written. CLI exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace attachmix
