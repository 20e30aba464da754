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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srd/corpus.hpp"
#include "srd/metrics.hpp"
#include "srd/rankmodel.hpp"
#include "srd/ranking.hpp"

namespace srd {

enum class EvaluationMode { kEmpirical, kBetaBinomial, kBoth };

std::string_view to_string(EvaluationMode mode);
EvaluationMode parse_mode(std::string_view text);

/// Settings read from a policy file: cohort construction, the fit, and how
/// model-mode MeanD is weighted.
struct RunConfig {
  CohortPolicy policy;
  FitConfig fit;
  MeanWeighting mean_weighting = MeanWeighting::kEmpirical;
  std::vector<double> f0_bin_edges;  // empty: 107 uniform bins over 65-450 Hz
};

/// Parses either a JSON object or `key = value` lines (`#` starts a
/// comment). Unknown keys are an error.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// One cell of a results table: a system/representation pair under one
/// gamma source.
struct EvaluationRun {
  std::string system_label;
  std::string representation_label;
  SimilarityMeasure measure = SimilarityMeasure::kCosineSimilarity;
  std::string cohort_fingerprint;
  DisclosureSummary summary;
  RankDistribution rank_distribution;
  std::optional<BetaBinomialModel> model;
  std::optional<double> eer_percent;
  std::size_t n_inputs = 0;
};

struct Evaluation {
  std::vector<EvaluationRun> runs;
  std::vector<RankObservation> observations;
  CorpusDiagnostics corpus;
  std::size_t tied_inputs = 0;
  bool eer_degenerate = false;
};

struct EvaluationOptions {
  std::string system_label = "system";
  std::string representation_label = "representation";
  SimilarityMeasure measure = SimilarityMeasure::kCosineSimilarity;
  EvaluationMode mode = EvaluationMode::kBoth;
  bool compute_eer = true;
  /// Drop speakers too small for the policy instead of failing.
  bool drop_ineligible_speakers = false;
  RunConfig config;
};

/// FNV-1a over ids and the bit patterns of every feature value, as 16 hex
/// digits.
std::string cohort_fingerprint(const Cohort& cohort);

/// Rank, fit and summarise an already-built cohort.
Evaluation evaluate_cohort(const Cohort& cohort, const EvaluationOptions& options);

/// Load features, build the cohort, then evaluate_cohort.
Evaluation run_evaluation(const std::filesystem::path& features_path, FeatureFormat format,
                          FeatureKind csv_kind, const EvaluationOptions& options);

}  // namespace srd
