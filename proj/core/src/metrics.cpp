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

#include "srd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "srd/error.hpp"

namespace srd {
namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("metrics", message); }

double percent_above_chance(std::span<const double> gamma) {
  const double chance = 1.0 / static_cast<double>(gamma.size());
  const auto above = std::count_if(gamma.begin(), gamma.end(), [&](double g) { return g > chance; });
  return 100.0 * static_cast<double>(above) / static_cast<double>(gamma.size());
}

}  // namespace

std::string_view to_string(GammaSource source) {
  return source == GammaSource::kBetaBinomial ? "betabinomial" : "empirical";
}

double disclosure(double gamma_j, std::size_t n_references) {
  if (n_references < 2) fail("disclosure needs at least two references");
  if (!(gamma_j > 0.0)) fail("disclosure undefined for zero probability (unobserved rank)");
  if (gamma_j > 1.0) fail("probability exceeds 1");
  return std::log2(static_cast<double>(n_references) * gamma_j);
}

DisclosureSummary summarize(const RankDistribution& dist) {
  const std::size_t n = dist.n_references();
  const auto p = dist.probabilities();
  const auto counts = dist.counts();
  DisclosureSummary s;
  s.gamma_source = GammaSource::kEmpirical;
  s.max_disclosure = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (counts[j] == 0) continue;
    const double e = disclosure(p[j], n);
    s.max_disclosure = std::max(s.max_disclosure, e);
    s.mean_disclosure += p[j] * e;
  }
  s.identification_rate = 100.0 * p[0];
  s.rank_spread = percent_above_chance(p);
  return s;
}

DisclosureSummary summarize(const RankDistribution& dist, const BetaBinomialModel& model,
                            MeanWeighting weighting) {
  const std::size_t n = dist.n_references();
  if (model.n_references != n || model.gamma.size() != n)
    fail("model has " + std::to_string(model.n_references) + " ranks, distribution has " +
         std::to_string(n));
  // Disclosure from the log pmf so far-tail ranks whose gamma underflows
  // still get a finite value.
  const auto log_gamma = log_betabinom_pmf(model.alpha, model.beta, n);
  const double log2_n = std::log2(static_cast<double>(n));
  auto eps = [&](std::size_t j) { return log2_n + log_gamma[j] / std::numbers::ln2; };

  const auto p = dist.probabilities();
  const auto counts = dist.counts();
  DisclosureSummary s;
  s.gamma_source = GammaSource::kBetaBinomial;
  s.max_disclosure = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double e = eps(j);
    s.max_disclosure = std::max(s.max_disclosure, e);
    if (weighting == MeanWeighting::kModel)
      s.mean_disclosure += model.gamma[j] * e;
    else if (counts[j] > 0)
      s.mean_disclosure += p[j] * e;
  }
  s.identification_rate = 100.0 * p[0];
  s.rank_spread = percent_above_chance(model.gamma);
  return s;
}

EerResult compute_eer(ScoreSet scores) {
  auto& targets = scores.target_scores;
  auto& nontargets = scores.nontarget_scores;
  if (targets.empty() || nontargets.empty()) fail("EER needs target and nontarget scores");
  for (double v : targets)
    if (!std::isfinite(v)) fail("non-finite target score");
  for (double v : nontargets)
    if (!std::isfinite(v)) fail("non-finite nontarget score");
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());

  std::vector<double> thresholds;
  thresholds.reserve(targets.size() + nontargets.size());
  std::merge(targets.begin(), targets.end(), nontargets.begin(), nontargets.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  EerResult result;
  result.degenerate = thresholds.size() == 1;

  const double nt = static_cast<double>(targets.size());
  const double nn = static_cast<double>(nontargets.size());
  auto rates = [&](double t) {
    const auto below = std::lower_bound(targets.begin(), targets.end(), t) - targets.begin();
    const auto below_nt =
        std::lower_bound(nontargets.begin(), nontargets.end(), t) - nontargets.begin();
    return std::pair{static_cast<double>(below) / nt,
                     (nn - static_cast<double>(below_nt)) / nn};
  };

  // Lowest threshold: FRR = 0, FAR = 1, so FRR - FAR starts at -1. The
  // sentinel above every score has FRR = 1, FAR = 0.
  double prev_frr = 0.0, prev_far = 1.0, prev_t = thresholds.front();
  for (std::size_t i = 0; i <= thresholds.size(); ++i) {
    const bool sentinel = i == thresholds.size();
    const double t = sentinel ? std::numeric_limits<double>::infinity() : thresholds[i];
    const auto [frr, far] = sentinel ? std::pair{1.0, 0.0} : rates(t);
    const double d = frr - far;
    if (d == 0.0) {
      result.eer_percent = 100.0 * frr;
      result.threshold = t;
      return result;
    }
    if (d > 0.0) {
      const double prev_d = prev_frr - prev_far;
      const double w = -prev_d / (d - prev_d);
      result.eer_percent = 100.0 * (prev_frr + w * (frr - prev_frr));
      result.threshold = sentinel ? prev_t : prev_t + w * (t - prev_t);
      return result;
    }
    prev_frr = frr;
    prev_far = far;
    prev_t = t;
  }
  fail("EER sweep found no crossing");  // unreachable: the sentinel has d = 1
}

double eer(ScoreSet scores) { return compute_eer(std::move(scores)).eer_percent; }

ScoreSet score_cohort_trials(const Cohort& cohort, SimilarityMeasure measure) {
  if (cohort.inputs.empty()) fail("cohort has no inputs");
  const std::vector<double> matrix = score_matrix(cohort, measure);
  const std::size_t n_refs = cohort.n_references();
  ScoreSet out;
  out.target_scores.reserve(cohort.inputs.size());
  out.nontarget_scores.reserve(cohort.inputs.size() * (n_refs - 1));
  for (std::size_t i = 0; i < cohort.inputs.size(); ++i) {
    for (std::size_t j = 0; j < n_refs; ++j) {
      const double s = matrix[i * n_refs + j];
      if (cohort.references[j].speaker_id == cohort.inputs[i].speaker_id)
        out.target_scores.push_back(s);
      else
        out.nontarget_scores.push_back(s);
    }
  }
  std::sort(out.target_scores.begin(), out.target_scores.end());
  std::sort(out.nontarget_scores.begin(), out.nontarget_scores.end());
  return out;
}

}  // namespace srd
