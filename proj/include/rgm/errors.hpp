// Copyright 2026 The RGM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rgm {

/// A named operand value attached to an error for display.
struct Operand {
  std::string name;
  double value;
};

/// Base class for every error raised by the toolkit. Carries the violated
/// condition symbolically together with the operand values involved.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string condition, std::vector<Operand> operands)
      : std::runtime_error(Format(kind, condition, operands)),
        condition_(std::move(condition)),
        operands_(std::move(operands)) {}

  const std::string& condition() const { return condition_; }
  const std::vector<Operand>& operands() const { return operands_; }

 private:
  static std::string Format(const std::string& kind,
                            const std::string& condition,
                            const std::vector<Operand>& operands) {
    std::ostringstream os;
    os.precision(17);
    os << kind << ": requires " << condition;
    if (!operands.empty()) {
      os << " (";
      for (std::size_t i = 0; i < operands.size(); ++i) {
        if (i) os << ", ";
        os << operands[i].name << "=" << operands[i].value;
      }
      os << ")";
    }
    return os.str();
  }

  std::string condition_;
  std::vector<Operand> operands_;
};

/// A parameter is outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  DomainError(std::string condition, std::vector<Operand> operands = {})
      : Error("domain error", std::move(condition), std::move(operands)) {}
};

/// A closed-form result was requested outside its stated preconditions.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string condition, std::vector<Operand> operands = {})
      : Error("precondition error", std::move(condition), std::move(operands)) {}
};

/// An SPD factorization failed.
class SingularityError : public Error {
 public:
  SingularityError(std::string condition, std::vector<Operand> operands = {})
      : Error("singular matrix", std::move(condition), std::move(operands)) {}
};

/// Malformed input text; `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline void Require(bool ok, const char* condition,
                    std::vector<Operand> operands = {}) {
  if (!ok) throw DomainError(condition, std::move(operands));
}

}  // namespace detail
}  // namespace rgm
