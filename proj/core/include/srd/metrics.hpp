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
#include <string_view>
#include <vector>

#include "srd/corpus.hpp"
#include "srd/rankmodel.hpp"
#include "srd/ranking.hpp"

namespace srd {

enum class GammaSource { kEmpirical, kBetaBinomial };

std::string_view to_string(GammaSource source);

/// Which probabilities weight MeanD when gamma comes from a fitted model.
/// Empirical mode always weights by p~.
enum class MeanWeighting { kEmpirical, kModel };

struct DisclosureSummary {
  double max_disclosure = 0.0;       // bits
  double mean_disclosure = 0.0;      // bits
  double identification_rate = 0.0;  // percent
  double rank_spread = 0.0;          // percent
  GammaSource gamma_source = GammaSource::kEmpirical;
};

/// Rank-order disclosure in bits, log2(N * gamma_j): positive when rank j is
/// more probable than chance, zero at gamma_j = 1/N.
///
/// Note the sign: -log2(gamma_j) - log2(N) is the negation of this and would
/// report every informative rank as negative.
double disclosure(double gamma_j, std::size_t n_references);

/// MaxD, MeanD, IdR and Rank Spread with gamma = p~.
DisclosureSummary summarize(const RankDistribution& dist);

/// The same statistics with gamma taken from a fitted model. IdR stays
/// empirical. MaxD ranges over all ranks; MeanD weights by p~ over observed
/// ranks unless `weighting` asks for the model's own gamma.
DisclosureSummary summarize(const RankDistribution& dist, const BetaBinomialModel& model,
                            MeanWeighting weighting = MeanWeighting::kEmpirical);

struct ScoreSet {
  std::vector<double> target_scores;
  std::vector<double> nontarget_scores;
};

struct EerResult {
  double eer_percent = 0.0;
  double threshold = 0.0;
  /// Every score in both lists was the same value.
  bool degenerate = false;
};

/// Equal error rate. Thresholds sweep the distinct scores plus one point
/// above the maximum; at threshold t, FRR = P(target < t) and
/// FAR = P(nontarget >= t). The EER is read off by linear interpolation
/// where FRR - FAR changes sign.
EerResult compute_eer(ScoreSet scores);
double eer(ScoreSet scores);

/// Every (input, reference) pair: same speaker goes to targets, other
/// speakers to nontargets. Both lists are returned sorted.
ScoreSet score_cohort_trials(const Cohort& cohort, SimilarityMeasure measure);

}  // namespace srd
