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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srd {

enum class FeatureKind { kEmbedding, kHistogram };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

/// A speaker embedding or a normalised histogram (F0, pseudo-phone codes).
struct FeatureVector {
  std::vector<double> values;
  FeatureKind kind = FeatureKind::kEmbedding;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Throws srd::Error unless values are non-empty and finite, and, for
/// histograms, non-negative and summing to 1 within 1e-6.
void validate(const FeatureVector& feature);

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  FeatureVector feature;

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

/// One aggregated reference per speaker. `source_utterances` keeps the
/// provenance needed to check that inputs and references never share an
/// utterance.
struct Reference {
  std::string speaker_id;
  FeatureVector feature;
  std::vector<std::string> source_utterances;

  friend bool operator==(const Reference&, const Reference&) = default;
};

/// Inputs x and the reference database y. References are stored sorted by
/// speaker id; inputs are sorted by (speaker id, utterance id).
struct Cohort {
  std::vector<UtteranceRecord> inputs;
  std::vector<Reference> references;

  std::size_t n_references() const { return references.size(); }
  friend bool operator==(const Cohort&, const Cohort&) = default;
};

/// Throws srd::Error if the reference speaker ids repeat, an input's speaker
/// lacks a reference, or an input utterance also feeds a reference.
void validate(const Cohort& cohort);

enum class Aggregation { kMean, kMedoid };

std::string_view to_string(Aggregation aggregation);
Aggregation parse_aggregation(std::string_view text);

struct CohortPolicy {
  int references_per_speaker = 1;
  Aggregation aggregation = Aggregation::kMean;
  int min_inputs_per_speaker = 1;
  std::uint64_t shuffle_seed = 0;
};

enum class FeatureFormat { kCsv, kJsonManifest, kF0FramesCsv };

FeatureFormat parse_feature_format(std::string_view text);

struct ExcludedUtterance {
  std::string utterance_id;
  std::string speaker_id;
  std::string reason;
};

/// Side-channel bookkeeping written next to a report as diagnostics.json.
struct CorpusDiagnostics {
  std::size_t unvoiced_frames_dropped = 0;
  std::size_t out_of_range_frames_dropped = 0;
  std::vector<ExcludedUtterance> excluded_utterances;
  std::map<std::string, std::size_t> utterances_per_speaker;
};

/// Feature CSV: header `utterance_id,speaker_id,f0,...,f{d-1}`. CSV rows carry
/// no kind column, so the caller states it. Histogram rows within 1e-3 of
/// summing to one are renormalised; others are rejected.
std::vector<UtteranceRecord> load_features_csv(const std::filesystem::path& path,
                                               FeatureKind kind = FeatureKind::kEmbedding);

/// JSON manifest: array of {"utterance_id","speaker_id","kind","values":[...]}.
std::vector<UtteranceRecord> load_features_json(const std::filesystem::path& path);

std::vector<UtteranceRecord> load_features(const std::filesystem::path& path,
                                           FeatureFormat format,
                                           FeatureKind csv_kind = FeatureKind::kEmbedding);

// ---------------------------------------------------------------------------
// F0 histograms

struct F0Frame {
  double f0_hz = 0.0;
  bool voiced = false;
};

/// Admissible pitch range for bin edges and frames.
struct F0Range {
  double min_hz = 65.0;
  double max_hz = 450.0;
};

/// 108 edges, i.e. 107 uniform bins spanning `range`.
std::vector<double> default_f0_bin_edges(F0Range range = {});

struct F0Histogram {
  FeatureVector feature;
  std::size_t unvoiced_dropped = 0;
  std::size_t out_of_range_dropped = 0;
};

/// Bins voiced frames into [e_i, e_{i+1}) with the last bin closed on the
/// right. Voiced frames outside [first edge, last edge] are dropped and
/// counted. Throws EmptyF0Evidence if nothing is left to bin.
F0Histogram f0_histogram(std::span<const F0Frame> frames, std::span<const double> bin_edges,
                         F0Range range = {});

/// Frame-level F0 CSV: header `utterance_id,speaker_id,f0_hz,voiced`, one
/// row per frame, voiced given as 0/1. Utterances without usable frames are
/// excluded and listed in `diagnostics`.
std::vector<UtteranceRecord> load_f0_frames(const std::filesystem::path& path,
                                            std::span<const double> bin_edges,
                                            CorpusDiagnostics& diagnostics, F0Range range = {});

// ---------------------------------------------------------------------------
// Cohort construction

/// Running arithmetic mean; k copies of the same vector yield that vector
/// bit-for-bit.
std::vector<double> mean_vector(std::span<const FeatureVector> features);

/// Splits each speaker's utterances into `references_per_speaker` reference
/// utterances (seeded shuffle) and inputs, and aggregates the reference side
/// into one vector per speaker.
Cohort build_cohort(std::span<const UtteranceRecord> records, const CohortPolicy& policy);

/// Drops every speaker with fewer than references_per_speaker +
/// min_inputs_per_speaker utterances, listing their utterances in
/// `diagnostics`. Use before build_cohort on pooled lists where some speakers
/// are expected to fall short.
std::vector<UtteranceRecord> filter_eligible_speakers(std::span<const UtteranceRecord> records,
                                                      const CohortPolicy& policy,
                                                      CorpusDiagnostics& diagnostics);

/// Per-speaker utterance counts of `records`.
std::map<std::string, std::size_t> tally_speakers(std::span<const UtteranceRecord> records);

/// Writes `records` in the feature CSV layout.
void write_features_csv(std::ostream& out, std::span<const UtteranceRecord> records);

}  // namespace srd
