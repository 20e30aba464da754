// Copyright 2026 The srd Authors
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

namespace srd {

/// Base exception for every failure raised by the library. The module name
/// ("corpus", "ranking", ...) is kept separately so the CLI can report where
/// a failure originated.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Raised by f0_histogram when no voiced in-range frame survives filtering.
class EmptyF0Evidence : public Error {
 public:
  explicit EmptyF0Evidence(const std::string& what)
      : Error("corpus", "empty F0 evidence: " + what) {}
};

/// Raised by fit() when the simplex search exhausts its iteration budget.
/// Carries the best parameters found so far.
class FitNotConverged : public Error {
 public:
  FitNotConverged(double alpha, double beta, double loss, int iterations);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double loss() const noexcept { return loss_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double alpha_;
  double beta_;
  double loss_;
  int iterations_;
};

}  // namespace srd
