/* Copyright 2026 The mixlab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

/// Argument outside the domain where a loss or formula is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A two-point construction whose parameters violate its invariants
/// (for example ytilde1 <= a, or a non-positive risk gap).
class InfeasibleConstruction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Config file could not be parsed; carries the offending line and field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace mixlab
