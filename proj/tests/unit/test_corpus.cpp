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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "srd/corpus.hpp"
#include "srd/error.hpp"

namespace {

const std::string kData = SRD_TEST_DATA_DIR;

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const srd::Error& e) {
    return e.what();
  }
  return {};
}

srd::UtteranceRecord embedding(std::string utt, std::string spk, std::vector<double> v) {
  return {std::move(utt), std::move(spk), {std::move(v), srd::FeatureKind::kEmbedding}};
}

std::vector<srd::UtteranceRecord> grid_records(int speakers, int per_speaker, int dim = 3) {
  std::vector<srd::UtteranceRecord> out;
  for (int s = 0; s < speakers; ++s)
    for (int u = 0; u < per_speaker; ++u) {
      std::vector<double> v(dim);
      for (int d = 0; d < dim; ++d) v[d] = 1.0 + s + 0.1 * u + 0.01 * d;
      out.push_back(embedding("s" + std::to_string(s) + "_u" + std::to_string(u),
                              "s" + std::to_string(s), v));
    }
  return out;
}

// --- load_features ---------------------------------------------------------

TEST(LoadFeatures, ThreeRowCsv) {
  const auto recs = srd::load_features(kData + "/three_rows.csv", srd::FeatureFormat::kCsv);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].utterance_id, "u1");
  EXPECT_EQ(recs[2].speaker_id, "s2");
  for (const auto& r : recs) EXPECT_EQ(r.feature.dim(), 4u);
  EXPECT_DOUBLE_EQ(recs[1].feature.values[1], -2.0);
  EXPECT_DOUBLE_EQ(recs[1].feature.values[2], 0.3);
}

TEST(LoadFeatures, NanNamesUtteranceAndColumn) {
  const std::string msg = error_of([] { srd::load_features_csv(kData + "/nan_row.csv"); });
  EXPECT_NE(msg.find("'u2'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'f1'"), std::string::npos) << msg;
  EXPECT_NE(msg.find(":3"), std::string::npos) << msg;
}

TEST(LoadFeatures, HistogramNearOneIsRenormalised) {
  const auto recs =
      srd::load_features_csv(kData + "/histogram_near_one.csv", srd::FeatureKind::kHistogram);
  ASSERT_EQ(recs.size(), 2u);
  const double raw[] = {0.5, 0.3, 0.2004};
  const double raw_sum = 0.5 + 0.3 + 0.2004;  // 1.0004
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(recs[0].feature.values[i], raw[i] / raw_sum, 1e-15);
    sum += recs[0].feature.values[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_NO_THROW(srd::validate(recs[0].feature));
}

TEST(LoadFeatures, HistogramFarFromOneRejected) {
  const std::string msg = error_of(
      [] { srd::load_features_csv(kData + "/histogram_bad_sum.csv", srd::FeatureKind::kHistogram); });
  EXPECT_NE(msg.find("'u1'"), std::string::npos) << msg;
}

TEST(LoadFeatures, MalformedRowsReportLocus) {
  EXPECT_NE(error_of([] { srd::load_features_csv(kData + "/wrong_arity.csv"); }).find(":3"),
            std::string::npos);
  EXPECT_NE(error_of([] { srd::load_features_csv(kData + "/duplicate_id.csv"); })
                .find("duplicate utterance_id 'u1'"),
            std::string::npos);
  EXPECT_NE(error_of([] { srd::load_features_csv(kData + "/non_numeric.csv"); }).find("not a number"),
            std::string::npos);
  EXPECT_NE(error_of([] { srd::load_features_csv(kData + "/empty.csv"); }).find("empty file"),
            std::string::npos);
  EXPECT_NE(error_of([] { srd::load_features_csv(kData + "/does_not_exist.csv"); }).find("cannot open"),
            std::string::npos);
}

TEST(LoadFeatures, JsonManifest) {
  const auto recs = srd::load_features(kData + "/manifest.json", srd::FeatureFormat::kJsonManifest);
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[2].speaker_id, "B");
  EXPECT_EQ(recs[0].feature.kind, srd::FeatureKind::kHistogram);
  const std::string msg = error_of([] { srd::load_features_json(kData + "/manifest_bad_entry.json"); });
  EXPECT_NE(msg.find("entry 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("a2"), std::string::npos) << msg;
}

TEST(FeatureVector, ValidateRejectsBadValues) {
  EXPECT_THROW(srd::validate(srd::FeatureVector{{}, srd::FeatureKind::kEmbedding}), srd::Error);
  EXPECT_THROW(srd::validate(srd::FeatureVector{{1.0, INFINITY}, srd::FeatureKind::kEmbedding}),
               srd::Error);
  EXPECT_THROW(srd::validate(srd::FeatureVector{{0.5, 0.6}, srd::FeatureKind::kHistogram}),
               srd::Error);
  EXPECT_THROW(srd::validate(srd::FeatureVector{{1.5, -0.5}, srd::FeatureKind::kHistogram}),
               srd::Error);
  EXPECT_NO_THROW(srd::validate(srd::FeatureVector{{0.25, 0.75}, srd::FeatureKind::kHistogram}));
}

// --- f0_histogram ----------------------------------------------------------

TEST(F0Histogram, HandCountedExample) {
  const std::vector<srd::F0Frame> frames{{100, true}, {100, true}, {200, true}, {150, false}};
  const std::vector<double> edges{65, 150, 450};
  const auto h = srd::f0_histogram(frames, edges);
  ASSERT_EQ(h.feature.values.size(), 2u);
  EXPECT_DOUBLE_EQ(h.feature.values[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(h.feature.values[1], 1.0 / 3.0);
  EXPECT_EQ(h.feature.kind, srd::FeatureKind::kHistogram);
  EXPECT_EQ(h.unvoiced_dropped, 1u);
  EXPECT_EQ(h.out_of_range_dropped, 0u);
}

TEST(F0Histogram, AllUnvoicedIsEmptyEvidence) {
  const std::vector<srd::F0Frame> frames{{100, false}, {0, false}};
  const auto edges = srd::default_f0_bin_edges();
  EXPECT_THROW(srd::f0_histogram(frames, edges), srd::EmptyF0Evidence);
  EXPECT_THROW(srd::f0_histogram(std::vector<srd::F0Frame>{}, edges), srd::EmptyF0Evidence);
}

TEST(F0Histogram, BelowRangeFrameDropped) {
  const std::vector<srd::F0Frame> frames{{60, true}, {100, true}};
  const auto h = srd::f0_histogram(frames, srd::default_f0_bin_edges());
  EXPECT_EQ(h.out_of_range_dropped, 1u);
  EXPECT_DOUBLE_EQ(std::accumulate(h.feature.values.begin(), h.feature.values.end(), 0.0), 1.0);
  // 451 Hz is above range too; exactly 450 Hz lands in the last bin.
  const std::vector<srd::F0Frame> edge_frames{{451, true}, {450, true}, {65, true}};
  const auto e = srd::f0_histogram(edge_frames, srd::default_f0_bin_edges());
  EXPECT_EQ(e.out_of_range_dropped, 1u);
  EXPECT_DOUBLE_EQ(e.feature.values.back(), 0.5);
  EXPECT_DOUBLE_EQ(e.feature.values.front(), 0.5);
}

TEST(F0Histogram, DefaultEdgesGive107BinsOver65To450Hz) {
  const auto edges = srd::default_f0_bin_edges();
  ASSERT_EQ(edges.size(), 108u);
  EXPECT_DOUBLE_EQ(edges.front(), 65.0);
  EXPECT_DOUBLE_EQ(edges.back(), 450.0);
  for (std::size_t i = 1; i < edges.size(); ++i) EXPECT_GT(edges[i], edges[i - 1]);
}

TEST(F0Histogram, RejectsBadEdges) {
  const std::vector<srd::F0Frame> frames{{100, true}};
  EXPECT_THROW(srd::f0_histogram(frames, std::vector<double>{100, 90}), srd::Error);
  EXPECT_THROW(srd::f0_histogram(frames, std::vector<double>{50, 200}), srd::Error);
  EXPECT_THROW(srd::f0_histogram(frames, std::vector<double>{100, 500}), srd::Error);
  EXPECT_THROW(srd::f0_histogram(frames, std::vector<double>{100}), srd::Error);
  // A custom range widens what the edges may span.
  EXPECT_NO_THROW(srd::f0_histogram(frames, std::vector<double>{50, 500}, srd::F0Range{40, 600}));
}

TEST(F0Histogram, PropertySumsToOneAndIgnoresOrder) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> hz(30.0, 500.0);
  std::bernoulli_distribution voiced(0.7);
  const auto edges = srd::default_f0_bin_edges();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<srd::F0Frame> frames(200);
    for (auto& f : frames) f = {hz(gen), voiced(gen)};
    frames.push_back({120.0, true});
    const auto a = srd::f0_histogram(frames, edges);
    std::shuffle(frames.begin(), frames.end(), gen);
    const auto b = srd::f0_histogram(frames, edges);
    EXPECT_EQ(a.feature, b.feature);
    EXPECT_NEAR(std::accumulate(a.feature.values.begin(), a.feature.values.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(LoadF0Frames, BuildsHistogramsAndDiagnostics) {
  srd::CorpusDiagnostics diag;
  const auto edges = srd::default_f0_bin_edges();
  const auto recs = srd::load_f0_frames(kData + "/f0_frames.csv", edges, diag);
  EXPECT_EQ(recs.size(), 9u);
  ASSERT_EQ(diag.excluded_utterances.size(), 1u);
  EXPECT_EQ(diag.excluded_utterances[0].utterance_id, "s1_silent");
  EXPECT_EQ(diag.out_of_range_frames_dropped, 9u);
  EXPECT_EQ(diag.unvoiced_frames_dropped, 9u * 12u + 10u);
  for (const auto& r : recs) EXPECT_NO_THROW(srd::validate(r.feature));
}

// --- build_cohort ----------------------------------------------------------

TEST(BuildCohort, ThreeSpeakersFourUtterances) {
  const auto recs = grid_records(3, 4);
  const auto cohort = srd::build_cohort(recs, srd::CohortPolicy{});
  EXPECT_EQ(cohort.n_references(), 3u);
  EXPECT_EQ(cohort.inputs.size(), 9u);
  std::set<std::string> input_ids, ref_ids;
  for (const auto& in : cohort.inputs) input_ids.insert(in.utterance_id);
  for (const auto& r : cohort.references)
    ref_ids.insert(r.source_utterances.begin(), r.source_utterances.end());
  EXPECT_EQ(ref_ids.size(), 3u);
  for (const auto& id : ref_ids) EXPECT_FALSE(input_ids.contains(id)) << id;
  EXPECT_EQ(input_ids.size() + ref_ids.size(), recs.size());
}

TEST(BuildCohort, TooFewUtterancesNamesSpeaker) {
  auto recs = grid_records(3, 4);
  recs.push_back(embedding("lonely_u0", "lonely", {1.0, 2.0, 3.0}));
  const std::string msg = error_of([&] { srd::build_cohort(recs, srd::CohortPolicy{}); });
  EXPECT_NE(msg.find("'lonely'"), std::string::npos) << msg;
}

TEST(BuildCohort, MixedDimensionsOrKindsRejected) {
  auto recs = grid_records(2, 3);
  recs.push_back(embedding("x", "s0", {1.0, 2.0}));
  EXPECT_NE(error_of([&] { srd::build_cohort(recs, srd::CohortPolicy{}); }).find("mixed feature dimensions"),
            std::string::npos);
  recs.pop_back();
  recs.push_back({"y", "s0", {{0.2, 0.3, 0.5}, srd::FeatureKind::kHistogram}});
  EXPECT_NE(error_of([&] { srd::build_cohort(recs, srd::CohortPolicy{}); }).find("mixed feature kinds"),
            std::string::npos);
}

TEST(BuildCohort, DeterministicAndOrderIndependent) {
  auto recs = grid_records(5, 6);
  srd::CohortPolicy policy;
  policy.references_per_speaker = 2;
  policy.shuffle_seed = 99;
  const auto a = srd::build_cohort(recs, policy);
  std::mt19937 gen(1);
  std::shuffle(recs.begin(), recs.end(), gen);
  const auto b = srd::build_cohort(recs, policy);
  EXPECT_EQ(a, b);
}

TEST(BuildCohort, SeedChangesReferenceSelection) {
  const auto recs = grid_records(8, 10);
  srd::CohortPolicy p1, p2;
  p1.shuffle_seed = 1;
  p2.shuffle_seed = 2;
  const auto a = srd::build_cohort(recs, p1);
  const auto b = srd::build_cohort(recs, p2);
  int differing = 0;
  for (std::size_t i = 0; i < a.references.size(); ++i)
    differing += a.references[i].source_utterances != b.references[i].source_utterances;
  EXPECT_GT(differing, 0);
}

TEST(BuildCohort, MeanOfIdenticalVectorsIsExact) {
  const srd::FeatureVector v{{0.1, 0.7, 1.0 / 3.0, -2.5}, srd::FeatureKind::kEmbedding};
  for (std::size_t k : {1u, 2u, 3u, 7u, 10u}) {
    const std::vector<srd::FeatureVector> copies(k, v);
    EXPECT_EQ(srd::mean_vector(copies), v.values) << "k = " << k;
  }
}

TEST(BuildCohort, MeanAggregationNormalises) {
  std::vector<srd::UtteranceRecord> recs;
  for (int u = 0; u < 4; ++u) {
    recs.push_back(embedding("a" + std::to_string(u), "A", {3.0 + u, 4.0, 0.0}));
    recs.push_back({"h" + std::to_string(u), "H", {{0.25, 0.25, 0.5}, srd::FeatureKind::kHistogram}});
  }
  std::vector<srd::UtteranceRecord> embeddings, histograms;
  for (auto& r : recs) (r.speaker_id == "A" ? embeddings : histograms).push_back(r);
  srd::CohortPolicy policy;
  policy.references_per_speaker = 3;
  const auto ce = srd::build_cohort(embeddings, policy);
  double norm = 0.0;
  for (double v : ce.references[0].feature.values) norm += v * v;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  const auto ch = srd::build_cohort(histograms, policy);
  EXPECT_NEAR(ch.references[0].feature.values[2], 0.5, 1e-15);
  EXPECT_EQ(ch.references[0].source_utterances.size(), 3u);
}

TEST(BuildCohort, MedoidPicksCentralUtterance) {
  // With every utterance reserved except one input, the medoid of the
  // reserved set must be the middle histogram.
  std::vector<srd::UtteranceRecord> recs{
      {"m0", "M", {{0.9, 0.1}, srd::FeatureKind::kHistogram}},
      {"m1", "M", {{0.5, 0.5}, srd::FeatureKind::kHistogram}},
      {"m2", "M", {{0.1, 0.9}, srd::FeatureKind::kHistogram}},
      {"m3", "M", {{0.45, 0.55}, srd::FeatureKind::kHistogram}},
  };
  srd::CohortPolicy policy;
  policy.references_per_speaker = 4;
  policy.min_inputs_per_speaker = 0;
  policy.aggregation = srd::Aggregation::kMedoid;
  const auto cohort = srd::build_cohort(recs, policy);
  ASSERT_EQ(cohort.references.size(), 1u);
  EXPECT_EQ(cohort.references[0].feature.values, (std::vector<double>{0.45, 0.55}));
  EXPECT_TRUE(cohort.inputs.empty());
}

TEST(BuildCohort, PooledManifestYieldsFortyEligibleSpeakers) {
  // Enrolment and trial lists pooled: 29 speakers appear in both lists, 11
  // in one list only but with enough utterances once pooled, and 6 more
  // speakers contribute a single utterance and cannot be split.
  std::vector<srd::UtteranceRecord> pooled;
  auto add = [&](const std::string& spk, int n, const std::string& list) {
    for (int u = 0; u < n; ++u)
      pooled.push_back(embedding(list + "_" + spk + "_" + std::to_string(u), spk,
                                 {1.0 + spk.size(), 0.5 * u + 1.0, 2.0}));
  };
  for (int s = 0; s < 29; ++s) {
    add("common" + std::to_string(s), 3, "enrolls");
    add("common" + std::to_string(s), 5, "trials");
  }
  for (int s = 0; s < 11; ++s) add("single_list" + std::to_string(s), 4, "trials");
  for (int s = 0; s < 6; ++s) add("sparse" + std::to_string(s), 1, "trials");

  srd::CorpusDiagnostics diag;
  srd::CohortPolicy policy;
  EXPECT_THROW(srd::build_cohort(pooled, policy), srd::Error);
  const auto eligible = srd::filter_eligible_speakers(pooled, policy, diag);
  const auto cohort = srd::build_cohort(eligible, policy);
  EXPECT_EQ(cohort.n_references(), 40u);
  EXPECT_EQ(diag.excluded_utterances.size(), 6u);
  EXPECT_NO_THROW(srd::validate(cohort));
}

TEST(Cohort, ValidateCatchesOverlapAndMissingReference) {
  srd::Cohort c;
  c.references.push_back({"A", {{1.0, 0.0}, srd::FeatureKind::kEmbedding}, {"a0"}});
  c.inputs.push_back(embedding("a0", "A", {1.0, 0.0}));
  EXPECT_THROW(srd::validate(c), srd::Error);
  c.inputs[0].utterance_id = "a1";
  EXPECT_NO_THROW(srd::validate(c));
  c.inputs.push_back(embedding("b0", "B", {0.0, 1.0}));
  EXPECT_THROW(srd::validate(c), srd::Error);
  c.inputs.pop_back();
  c.references.push_back(c.references[0]);
  EXPECT_THROW(srd::validate(c), srd::Error);
}

}  // namespace
