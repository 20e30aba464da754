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
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srd/corpus.hpp"

namespace srd {

/// Higher score means more similar under both variants. "Cosine distance"
/// ranks identically to descending cosine similarity.
enum class SimilarityMeasure { kCosineSimilarity, kNegativeEuclidean };

std::string_view to_string(SimilarityMeasure measure);
/// Accepts "cosine", "cosine_similarity", "euclidean", "negative_euclidean".
SimilarityMeasure parse_measure(std::string_view text);

/// cosine: dot(x,y) / (|x| |y|); negative_euclidean: -|x - y|.
double similarity(std::span<const double> x, std::span<const double> y,
                  SimilarityMeasure measure);
double similarity(const FeatureVector& x, const FeatureVector& y, SimilarityMeasure measure);

struct RankObservation {
  std::string utterance_id;
  std::string speaker_id;
  std::size_t rank = 0;  // 1-based
  double score_at_rank1 = 0.0;
  double score_of_match = 0.0;

  friend bool operator==(const RankObservation&, const RankObservation&) = default;
};

/// Rank counts over 1..N and their normalisation p~_k. counts[0] is rank 1.
class RankDistribution {
 public:
  /// Throws srd::Error on N < 1, negative counts, or an all-zero vector.
  static RankDistribution from_counts(std::vector<std::int64_t> counts);
  static RankDistribution from_observations(std::span<const RankObservation> observations,
                                            std::size_t n_references);

  std::size_t n_references() const { return counts_.size(); }
  std::int64_t total() const { return total_; }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<const double> probabilities() const { return probabilities_; }
  /// 1-based accessors.
  std::int64_t count_at(std::size_t rank) const { return counts_.at(rank - 1); }
  double probability_at(std::size_t rank) const { return probabilities_.at(rank - 1); }

  friend bool operator==(const RankDistribution&, const RankDistribution&) = default;

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> probabilities_;
  std::int64_t total_ = 0;
};

/// Rank of the reference at `match_index` when references are ordered by
/// descending score, ties broken by ascending speaker id.
std::size_t rank_from_scores(std::span<const double> scores,
                             std::span<const std::string> reference_ids, std::size_t match_index);

RankObservation rank_of_match(const UtteranceRecord& input, const Cohort& cohort,
                              SimilarityMeasure measure);

/// Dense |inputs| x N score matrix in row-major order, computed in blocks.
/// Entry (i, j) is bit-identical to similarity(inputs[i], references[j]).
std::vector<double> score_matrix(const Cohort& cohort, SimilarityMeasure measure);

struct RankingResult {
  std::vector<RankObservation> observations;  // in cohort input order
  std::size_t tied_inputs = 0;  // inputs whose match score ties another reference
};

/// Ranks every input. Work is split across threads by input block; the
/// output never depends on the thread count.
RankingResult rank_all(const Cohort& cohort, SimilarityMeasure measure,
                       unsigned threads = 0);

RankDistribution rank_histogram(const Cohort& cohort, SimilarityMeasure measure);

/// `utterance_id,speaker_id,rank,score_at_rank1,score_of_match`
void write_observations_csv(std::ostream& out, std::span<const RankObservation> observations);

}  // namespace srd
