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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "srd/error.hpp"
#include "srd/rankmodel.hpp"
#include "srd/simulator.hpp"

namespace {

using srd::oracle::Rational;

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

TEST(BetaBinomialPmf, UniformIsExactlyOneOverN) {
  const auto g = srd::betabinom_pmf(1.0, 1.0, 40);
  ASSERT_EQ(g.size(), 40u);
  for (double v : g) EXPECT_EQ(v, 1.0 / 40.0);
}

TEST(BetaBinomialPmf, BetaBernoulli) {
  const auto g = srd::betabinom_pmf(1.0, 2.0, 2);
  EXPECT_NEAR(g[0], 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(g[1], 1.0 / 3.0, 1e-14);
}

TEST(BetaBinomialPmf, MatchesRationalOracle) {
  const std::vector<std::pair<double, Rational>> params{
      {0.5, Rational(1, 2)}, {1.0, Rational(1)}, {2.0, Rational(2)}, {5.0, Rational(5)}};
  for (int n = 2; n <= 12; ++n)
    for (const auto& [a, ar] : params)
      for (const auto& [b, br] : params) {
        const auto got = srd::betabinom_pmf(a, b, n);
        const auto want = srd::oracle::exact_betabinom_pmf(ar, br, n);
        for (int j = 0; j < n; ++j)
          ASSERT_NEAR(got[j], static_cast<double>(want[j]), 1e-10)
              << "N=" << n << " a=" << a << " b=" << b << " j=" << j;
      }
}

TEST(BetaBinomialPmf, SumsToOne) {
  for (double a : {0.001, 0.3, 1.7, 40.0, 1000.0})
    for (double b : {0.001, 0.9, 3.0, 250.0})
      for (std::size_t n : {2u, 7u, 40u, 500u}) {
        double s = 0.0;
        for (double v : srd::betabinom_pmf(a, b, n)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-9) << a << " " << b << " " << n;
      }
}

TEST(BetaBinomialPmf, Errors) {
  EXPECT_THROW(srd::betabinom_pmf(0.0, 1.0, 4), srd::Error);
  EXPECT_THROW(srd::betabinom_pmf(1.0, -2.0, 4), srd::Error);
  EXPECT_THROW(srd::betabinom_pmf(1.0, 1.0, 1), srd::Error);
}

TEST(LogLikelihood, SingleObservation) {
  const auto d = srd::RankDistribution::from_counts({1, 0, 0, 0});
  EXPECT_NEAR(srd::log_likelihood(d, 1.0, 1.0), std::log(0.25), 1e-12);
  EXPECT_NEAR(srd::log_likelihood(d, 1.0, 1.0), -1.3863, 1e-4);
}

TEST(LogLikelihood, LinearInCounts) {
  const auto d = srd::RankDistribution::from_counts({5, 3, 0, 2, 1});
  const auto d2 = srd::RankDistribution::from_counts({10, 6, 0, 4, 2});
  EXPECT_DOUBLE_EQ(srd::log_likelihood(d2, 0.7, 2.3), 2.0 * srd::log_likelihood(d, 0.7, 2.3));
}

TEST(Fit, UniformRecovery) {
  const auto d = srd::RankDistribution::from_counts(std::vector<std::int64_t>(40, 25));
  const auto m = srd::fit(d);
  for (double g : m.gamma) EXPECT_NEAR(g, 0.025, 1e-3);
}

TEST(Fit, RecoversGeneratingParameters) {
  const auto d = srd::synth_rank_samples(2.0, 5.0, 40, 10000, 12345);
  const auto m = srd::fit(d);
  EXPECT_NEAR(m.alpha, 2.0, 0.2);
  EXPECT_NEAR(m.beta, 5.0, 0.5);
  EXPECT_LE(std::abs(m.gamma[0] - d.probability_at(1)), 5e-3);
}

TEST(Fit, RankOnePenaltyHoldsAcrossShapes) {
  const std::vector<std::vector<std::int64_t>> cases{
      {566, 80, 40, 30, 20, 20, 10, 10, 5, 5, 4, 3, 2, 1, 1, 1, 1, 1},
      {76, 90, 95, 92, 100, 90, 85, 80, 70, 60, 40, 30, 20, 10, 5, 3, 2, 1, 1},
      {1, 0, 0, 9, 30, 60, 30, 9, 0, 1},
      {1000},
      {0, 0, 0, 0, 0, 0, 7},
      {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3, 8, 4}};
  for (const auto& counts : cases) {
    auto c = counts;
    c.resize(std::max<std::size_t>(c.size(), 2), 0);
    const auto d = srd::RankDistribution::from_counts(c);
    const auto m = srd::fit(d);
    EXPECT_LE(std::abs(m.gamma[0] - d.probability_at(1)), 5e-3) << "p1=" << d.probability_at(1);
  }
}

TEST(Fit, ImprovesOnStartingPoint) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = srd::synth_rank_samples(0.5 + seed * 0.3, 3.0, 20, 500, seed);
    const auto [a0, b0] = srd::moment_estimate(d);
    const auto m = srd::fit(d);
    EXPECT_LE(m.loss, srd::fit_loss(d, a0, b0, 1e4) + 1e-9);
    EXPECT_NEAR(m.loss, srd::fit_loss(d, m.alpha, m.beta, 1e4), 1e-9 * std::max(1.0, std::abs(m.loss)));
    EXPECT_GE(m.alpha, srd::kMinShape);
    EXPECT_LE(m.beta, srd::kMaxShape);
  }
}

TEST(Fit, UnpenalisedFitConvergesWithSampleSize) {
  srd::FitConfig cfg;
  cfg.rank1_penalty_weight = 0.0;
  const auto truth = srd::betabinom_pmf(2.0, 5.0, 40);
  double tv_small = 0.0, tv_large = 0.0;
  const int reps = 5;
  for (int r = 0; r < reps; ++r) {
    tv_small += total_variation(srd::fit(srd::synth_rank_samples(2.0, 5.0, 40, 100, 100 + r), cfg).gamma, truth);
    tv_large += total_variation(srd::fit(srd::synth_rank_samples(2.0, 5.0, 40, 10000, 200 + r), cfg).gamma, truth);
  }
  EXPECT_LT(tv_large, tv_small);
  EXPECT_LT(tv_large / reps, 0.02);
}

TEST(Fit, DecreasingShapeGivesMonotoneGamma) {
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0.5, 3.0}, {0.8, 1.5}, {0.3, 8.0}}) {
    const auto m = srd::fit(srd::synth_rank_samples(a, b, 40, 5000, 7));
    if (m.alpha <= 1.0 && 1.0 <= m.beta) {
      for (std::size_t j = 1; j < m.gamma.size(); ++j) EXPECT_LE(m.gamma[j], m.gamma[j - 1] * (1 + 1e-12));
    }
    const auto g = srd::betabinom_pmf(a, b, 40);
    for (std::size_t j = 1; j < g.size(); ++j) EXPECT_LE(g[j], g[j - 1]);
  }
}

TEST(Fit, Deterministic) {
  const auto d = srd::synth_rank_samples(1.3, 4.0, 40, 3000, 99);
  const auto a = srd::fit(d), b = srd::fit(d);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_EQ(srd::model_to_json(a), srd::model_to_json(b));
}

TEST(Fit, ExhaustedIterationsCarryBestSoFar) {
  const auto d = srd::synth_rank_samples(2.0, 5.0, 40, 1000, 1);
  srd::FitConfig cfg;
  cfg.max_iterations = 3;
  try {
    srd::fit(d, cfg);
    FAIL() << "expected FitNotConverged";
  } catch (const srd::FitNotConverged& e) {
    EXPECT_GT(e.alpha(), 0.0);
    EXPECT_GT(e.beta(), 0.0);
    EXPECT_TRUE(std::isfinite(e.loss()));
    EXPECT_EQ(e.module(), "rankmodel");
  }
}

TEST(Fit, MultistartNoWorse) {
  const auto d = srd::RankDistribution::from_counts({1, 0, 0, 9, 30, 60, 30, 9, 0, 1});
  srd::FitConfig cfg;
  const auto single = srd::fit(d, cfg);
  cfg.multistart = true;
  const auto multi = srd::fit(d, cfg);
  EXPECT_LE(multi.loss, single.loss + 1e-9);
}

TEST(MomentEstimate, SingleRankFallsBackToUniform) {
  const auto d = srd::RankDistribution::from_counts({0, 0, 12, 0});
  EXPECT_EQ(srd::moment_estimate(d), std::make_pair(1.0, 1.0));
}

TEST(ModelJson, Fields) {
  const auto m = srd::fit(srd::RankDistribution::from_counts({5, 3, 2}));
  const auto j = srd::model_to_json(m);
  for (const char* key : {"\"alpha\"", "\"beta\"", "\"gamma\"", "\"loss\"", "\"iterations\"",
                          "\"n_references\"", "rank1-quadratic-penalty"})
    EXPECT_NE(j.find(key), std::string::npos) << key;
}

}  // namespace
