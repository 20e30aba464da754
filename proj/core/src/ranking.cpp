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

#include "srd/ranking.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "srd/error.hpp"

namespace srd {
namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("ranking", message); }

// Block edge for the input x reference tiling. Any value gives identical
// results.
constexpr std::size_t kBlock = 64;

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double euclidean(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double checked_norm(std::span<const double> x, const std::string& what) {
  const double n = std::sqrt(dot(x, x));
  if (!(n > 0.0)) fail("cosine similarity undefined for zero vector (" + what + ")");
  return n;
}

struct Prepared {
  std::size_t dim = 0;
  std::vector<double> input_norms;
  std::vector<double> reference_norms;
};

Prepared prepare(const Cohort& cohort, SimilarityMeasure measure) {
  if (cohort.references.empty()) fail("cohort has no references");
  Prepared p;
  p.dim = cohort.references.front().feature.dim();
  for (const auto& r : cohort.references) {
    if (r.feature.dim() != p.dim) fail("reference dimension mismatch ('" + r.speaker_id + "')");
  }
  for (const auto& in : cohort.inputs) {
    if (in.feature.dim() != p.dim)
      fail("dimension mismatch: input '" + in.utterance_id + "' has " +
           std::to_string(in.feature.dim()) + ", references have " + std::to_string(p.dim));
  }
  if (measure == SimilarityMeasure::kCosineSimilarity) {
    for (const auto& r : cohort.references)
      p.reference_norms.push_back(checked_norm(r.feature.values, "reference " + r.speaker_id));
    for (const auto& in : cohort.inputs)
      p.input_norms.push_back(checked_norm(in.feature.values, "input " + in.utterance_id));
  }
  return p;
}

// Rows [begin, end) of the score matrix into `out`, which holds
// (end - begin) * N entries.
void score_rows(const Cohort& cohort, SimilarityMeasure measure, const Prepared& p,
                std::size_t begin, std::size_t end, std::span<double> out) {
  const std::size_t n_refs = cohort.references.size();
  for (std::size_t r0 = 0; r0 < n_refs; r0 += kBlock) {
    const std::size_t r1 = std::min(n_refs, r0 + kBlock);
    for (std::size_t i = begin; i < end; ++i) {
      const std::span<const double> x = cohort.inputs[i].feature.values;
      double* row = out.data() + (i - begin) * n_refs;
      for (std::size_t r = r0; r < r1; ++r) {
        const std::span<const double> y = cohort.references[r].feature.values;
        if (measure == SimilarityMeasure::kCosineSimilarity) {
          row[r] = dot(x, y) / (p.input_norms[i] * p.reference_norms[r]);
        } else {
          row[r] = -euclidean(x, y);
        }
      }
    }
  }
}

std::vector<std::string> reference_ids(const Cohort& cohort) {
  std::vector<std::string> ids;
  ids.reserve(cohort.references.size());
  for (const auto& r : cohort.references) ids.push_back(r.speaker_id);
  return ids;
}

std::unordered_map<std::string, std::size_t> reference_index(const Cohort& cohort) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < cohort.references.size(); ++j) {
    if (!index.emplace(cohort.references[j].speaker_id, j).second)
      fail("duplicate reference speaker '" + cohort.references[j].speaker_id + "'");
  }
  return index;
}

RankObservation observe(const UtteranceRecord& input, std::span<const double> scores,
                        std::span<const std::string> ids, std::size_t match,
                        bool* tied = nullptr) {
  RankObservation obs;
  obs.utterance_id = input.utterance_id;
  obs.speaker_id = input.speaker_id;
  obs.rank = rank_from_scores(scores, ids, match);
  obs.score_of_match = scores[match];
  std::size_t top = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[top] || (scores[j] == scores[top] && ids[j] < ids[top])) top = j;
  }
  obs.score_at_rank1 = scores[top];
  if (tied) {
    *tied = false;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (j != match && scores[j] == scores[match]) *tied = true;
    }
  }
  return obs;
}

}  // namespace

std::string_view to_string(SimilarityMeasure measure) {
  return measure == SimilarityMeasure::kCosineSimilarity ? "cosine_similarity"
                                                         : "negative_euclidean";
}

SimilarityMeasure parse_measure(std::string_view text) {
  if (text == "cosine" || text == "cosine_similarity") return SimilarityMeasure::kCosineSimilarity;
  if (text == "euclidean" || text == "negative_euclidean")
    return SimilarityMeasure::kNegativeEuclidean;
  fail("unknown similarity measure '" + std::string(text) + "'");
}

double similarity(std::span<const double> x, std::span<const double> y,
                  SimilarityMeasure measure) {
  if (x.size() != y.size())
    fail("dimension mismatch (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
         ")");
  if (x.empty()) fail("empty feature vectors");
  if (measure == SimilarityMeasure::kCosineSimilarity) {
    const double nx = checked_norm(x, "x");
    const double ny = checked_norm(y, "y");
    return dot(x, y) / (nx * ny);
  }
  return -euclidean(x, y);
}

double similarity(const FeatureVector& x, const FeatureVector& y, SimilarityMeasure measure) {
  return similarity(std::span<const double>(x.values), std::span<const double>(y.values),
                    measure);
}

// ---------------------------------------------------------------------------

RankDistribution RankDistribution::from_counts(std::vector<std::int64_t> counts) {
  if (counts.empty()) fail("rank distribution needs at least one rank");
  RankDistribution d;
  for (std::int64_t c : counts) {
    if (c < 0) fail("negative rank count");
    d.total_ += c;
  }
  if (d.total_ < 1) fail("rank distribution has no observations");
  d.probabilities_.reserve(counts.size());
  for (std::int64_t c : counts)
    d.probabilities_.push_back(static_cast<double>(c) / static_cast<double>(d.total_));
  d.counts_ = std::move(counts);
  return d;
}

RankDistribution RankDistribution::from_observations(
    std::span<const RankObservation> observations, std::size_t n_references) {
  std::vector<std::int64_t> counts(n_references, 0);
  for (const auto& o : observations) {
    if (o.rank < 1 || o.rank > n_references)
      fail("rank " + std::to_string(o.rank) + " of '" + o.utterance_id + "' outside [1, " +
           std::to_string(n_references) + "]");
    ++counts[o.rank - 1];
  }
  return from_counts(std::move(counts));
}

std::size_t rank_from_scores(std::span<const double> scores,
                             std::span<const std::string> reference_ids, std::size_t match_index) {
  if (scores.size() != reference_ids.size()) fail("scores and reference ids differ in length");
  if (match_index >= scores.size()) fail("match index out of range");
  const double m = scores[match_index];
  const std::string& id = reference_ids[match_index];
  std::size_t ahead = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (j == match_index) continue;
    if (scores[j] > m || (scores[j] == m && reference_ids[j] < id)) ++ahead;
  }
  return ahead + 1;
}

RankObservation rank_of_match(const UtteranceRecord& input, const Cohort& cohort,
                              SimilarityMeasure measure) {
  std::size_t match = cohort.references.size();
  std::vector<double> scores;
  scores.reserve(cohort.references.size());
  for (std::size_t j = 0; j < cohort.references.size(); ++j) {
    if (cohort.references[j].speaker_id == input.speaker_id) match = j;
    scores.push_back(similarity(input.feature, cohort.references[j].feature, measure));
  }
  if (match == cohort.references.size())
    fail("input '" + input.utterance_id + "': speaker '" + input.speaker_id +
         "' has no reference");
  const auto ids = reference_ids(cohort);
  return observe(input, scores, ids, match);
}

std::vector<double> score_matrix(const Cohort& cohort, SimilarityMeasure measure) {
  const Prepared p = prepare(cohort, measure);
  std::vector<double> out(cohort.inputs.size() * cohort.references.size());
  score_rows(cohort, measure, p, 0, cohort.inputs.size(), out);
  return out;
}

RankingResult rank_all(const Cohort& cohort, SimilarityMeasure measure, unsigned threads) {
  if (cohort.inputs.empty()) fail("cohort has no inputs");
  const Prepared p = prepare(cohort, measure);
  const auto index = reference_index(cohort);
  const auto ids = reference_ids(cohort);
  const std::size_t n_inputs = cohort.inputs.size();
  const std::size_t n_refs = cohort.references.size();

  std::vector<std::size_t> match(n_inputs);
  for (std::size_t i = 0; i < n_inputs; ++i) {
    const auto it = index.find(cohort.inputs[i].speaker_id);
    if (it == index.end())
      fail("input '" + cohort.inputs[i].utterance_id + "': speaker '" +
           cohort.inputs[i].speaker_id + "' has no reference");
    match[i] = it->second;
  }

  RankingResult result;
  result.observations.resize(n_inputs);
  std::vector<char> tied(n_inputs, 0);

  const std::size_t n_blocks = (n_inputs + kBlock - 1) / kBlock;
  auto work = [&](std::size_t first_block, std::size_t stride) {
    std::vector<double> rows(kBlock * n_refs);
    for (std::size_t b = first_block; b < n_blocks; b += stride) {
      const std::size_t begin = b * kBlock;
      const std::size_t end = std::min(n_inputs, begin + kBlock);
      score_rows(cohort, measure, p, begin, end, rows);
      for (std::size_t i = begin; i < end; ++i) {
        const std::span<const double> row(rows.data() + (i - begin) * n_refs, n_refs);
        bool t = false;
        result.observations[i] = observe(cohort.inputs[i], row, ids, match[i], &t);
        tied[i] = t;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers = std::min<std::size_t>(threads, n_blocks);
  if (n_workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work, w, n_workers);
  }
  result.tied_inputs = static_cast<std::size_t>(std::count(tied.begin(), tied.end(), 1));
  return result;
}

RankDistribution rank_histogram(const Cohort& cohort, SimilarityMeasure measure) {
  const RankingResult r = rank_all(cohort, measure);
  return RankDistribution::from_observations(r.observations, cohort.n_references());
}

void write_observations_csv(std::ostream& out, std::span<const RankObservation> observations) {
  out << "utterance_id,speaker_id,rank,score_at_rank1,score_of_match\n";
  char a[32], b[32];
  for (const auto& o : observations) {
    const auto ra = std::to_chars(a, a + sizeof(a), o.score_at_rank1);
    const auto rb = std::to_chars(b, b + sizeof(b), o.score_of_match);
    out << o.utterance_id << ',' << o.speaker_id << ',' << o.rank << ','
        << std::string_view(a, static_cast<std::size_t>(ra.ptr - a)) << ','
        << std::string_view(b, static_cast<std::size_t>(rb.ptr - b)) << '\n';
  }
}

}  // namespace srd
