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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "srd/ranking.hpp"

namespace srd {

/// Beta-binomial smoothing of a rank distribution: the match lands at rank j
/// with probability gamma_j = BB(j - 1; n = N - 1, alpha, beta).
struct BetaBinomialModel {
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t n_references = 0;
  std::vector<double> gamma;  // gamma[0] is rank 1
  double loss = 0.0;
  int iterations = 0;
};

enum class Initializer { kMethodOfMoments, kUniform };

struct FitConfig {
  /// Weight lambda of the rank-1 anchoring term lambda * M * (gamma_1 - p~_1)^2.
  double rank1_penalty_weight = 1e4;
  double tolerance = 1e-8;
  int max_iterations = 5000;
  Initializer initializer = Initializer::kMethodOfMoments;
  /// Also start from a 3x3 grid in log-parameter space and keep the best.
  bool multistart = false;
};

/// Label written into serialised models describing the loss.
inline constexpr std::string_view kConstraintForm = "rank1-quadratic-penalty";

/// Parameter box shared by the optimiser and the model invariant.
inline constexpr double kMinShape = 1e-3;
inline constexpr double kMaxShape = 1e3;

/// ln gamma_j for j = 1..N, via log-gamma.
std::vector<double> log_betabinom_pmf(double alpha, double beta, std::size_t n_references);

/// gamma_j for j = 1..N. Requires alpha, beta > 0 and N >= 2.
std::vector<double> betabinom_pmf(double alpha, double beta, std::size_t n_references);

/// sum_k counts[k] * ln gamma_k.
double log_likelihood(const RankDistribution& dist, double alpha, double beta);

/// -log_likelihood + lambda * M * (gamma_1 - p~_1)^2.
double fit_loss(const RankDistribution& dist, double alpha, double beta,
                double rank1_penalty_weight);

/// Method-of-moments starting point from the (rank - 1) sample, clipped into
/// the parameter box; (1, 1) when only one rank is observed.
std::pair<double, double> moment_estimate(const RankDistribution& dist);

/// Nelder-Mead search over (ln alpha, ln beta). Throws FitNotConverged when
/// max_iterations is exhausted.
BetaBinomialModel fit(const RankDistribution& dist, const FitConfig& config = {});

/// {alpha, beta, constraint_form, gamma, iterations, loss, n_references}
std::string model_to_json(const BetaBinomialModel& model);

}  // namespace srd
