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

#include "srd/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "detail.hpp"
#include "srd/error.hpp"
#include "srd/random.hpp"

namespace srd {
namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("corpus", message); }

std::string locus(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::ifstream open_or_fail(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  return in;
}

// Histogram rows get a looser check at load time than validate() applies:
// anything within 1e-3 of unit mass is rescaled.
void normalise_loaded_histogram(std::vector<double>& values, const std::string& where) {
  double sum = 0.0;
  for (double v : values) {
    if (v < 0.0) fail(where + ": histogram has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-3) {
    std::ostringstream os;
    os << where << ": histogram sums to " << sum << ", not 1";
    fail(os.str());
  }
  for (double& v : values) v /= sum;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail("zero-norm embedding in medoid selection");
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

FeatureVector finalise_reference(std::vector<double> values, FeatureKind kind,
                                 const std::string& speaker) {
  if (kind == FeatureKind::kHistogram) {
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    if (!(sum > 0.0)) fail("speaker '" + speaker + "': reference histogram has no mass");
    for (double& v : values) v /= sum;
  } else {
    double norm = 0.0;
    for (double v : values) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) fail("speaker '" + speaker + "': mean reference embedding is zero");
    for (double& v : values) v /= norm;
  }
  return FeatureVector{std::move(values), kind};
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::kHistogram ? "histogram" : "embedding";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "embedding") return FeatureKind::kEmbedding;
  if (text == "histogram") return FeatureKind::kHistogram;
  fail("unknown feature kind '" + std::string(text) + "'");
}

std::string_view to_string(Aggregation aggregation) {
  return aggregation == Aggregation::kMedoid ? "medoid" : "mean";
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "mean") return Aggregation::kMean;
  if (text == "medoid") return Aggregation::kMedoid;
  fail("unknown aggregation '" + std::string(text) + "'");
}

FeatureFormat parse_feature_format(std::string_view text) {
  if (text == "csv") return FeatureFormat::kCsv;
  if (text == "json" || text == "json-manifest") return FeatureFormat::kJsonManifest;
  if (text == "f0-frames") return FeatureFormat::kF0FramesCsv;
  fail("unknown feature format '" + std::string(text) + "'");
}

void validate(const FeatureVector& feature) {
  if (feature.values.empty()) fail("feature vector is empty");
  for (std::size_t i = 0; i < feature.values.size(); ++i) {
    if (!std::isfinite(feature.values[i]))
      fail("feature entry " + std::to_string(i) + " is not finite");
  }
  if (feature.kind == FeatureKind::kHistogram) {
    double sum = 0.0;
    for (double v : feature.values) {
      if (v < 0.0) fail("histogram has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) fail("histogram does not sum to 1");
  }
}

void validate(const Cohort& cohort) {
  std::set<std::string> speakers;
  std::unordered_set<std::string> reference_utterances;
  for (const auto& ref : cohort.references) {
    if (!speakers.insert(ref.speaker_id).second)
      fail("duplicate reference for speaker '" + ref.speaker_id + "'");
    reference_utterances.insert(ref.source_utterances.begin(), ref.source_utterances.end());
  }
  for (const auto& input : cohort.inputs) {
    if (!speakers.contains(input.speaker_id))
      fail("input '" + input.utterance_id + "' has no reference for speaker '" +
           input.speaker_id + "'");
    if (reference_utterances.contains(input.utterance_id))
      fail("utterance '" + input.utterance_id + "' is both input and reference");
  }
}

std::vector<UtteranceRecord> load_features_csv(const std::filesystem::path& path,
                                               FeatureKind kind) {
  std::ifstream in = open_or_fail(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) {
      for (auto f : detail::split(detail::trim(line), ',')) header.emplace_back(detail::trim(f));
      break;
    }
  }
  if (header.empty()) fail(path.string() + ": empty file");
  if (header.size() < 3 || header[0] != "utterance_id" || header[1] != "speaker_id")
    fail(locus(path, line_no) + ": header must be utterance_id,speaker_id,f0,...");
  const std::size_t dim = header.size() - 2;

  std::vector<UtteranceRecord> records;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto fields = detail::split(row, ',');
    if (fields.size() != header.size()) {
      fail(locus(path, line_no) + ": expected " + std::to_string(header.size()) +
           " fields, got " + std::to_string(fields.size()));
    }
    UtteranceRecord rec;
    rec.utterance_id = std::string(detail::trim(fields[0]));
    rec.speaker_id = std::string(detail::trim(fields[1]));
    if (rec.utterance_id.empty() || rec.speaker_id.empty())
      fail(locus(path, line_no) + ": empty utterance or speaker id");
    if (!seen.insert(rec.utterance_id).second)
      fail(locus(path, line_no) + ": duplicate utterance_id '" + rec.utterance_id + "'");
    rec.feature.kind = kind;
    rec.feature.values.reserve(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      const auto value = detail::parse_double(fields[c + 2]);
      const std::string where = locus(path, line_no) + ": utterance '" + rec.utterance_id +
                                "' column '" + header[c + 2] + "'";
      if (!value) fail(where + ": not a number");
      if (!std::isfinite(*value)) fail(where + ": non-finite value");
      rec.feature.values.push_back(*value);
    }
    if (kind == FeatureKind::kHistogram)
      normalise_loaded_histogram(rec.feature.values,
                                 locus(path, line_no) + ": utterance '" + rec.utterance_id + "'");
    records.push_back(std::move(rec));
  }
  if (records.empty()) fail(path.string() + ": no data rows");
  return records;
}

std::vector<UtteranceRecord> load_features_json(const std::filesystem::path& path) {
  std::ifstream in = open_or_fail(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": " + e.what());
  }
  if (!doc.is_array()) fail(path.string() + ": manifest must be a JSON array");
  if (doc.empty()) fail(path.string() + ": empty manifest");

  std::vector<UtteranceRecord> records;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& entry = doc[i];
    const std::string where = path.string() + ": entry " + std::to_string(i);
    if (!entry.is_object()) fail(where + ": not an object");
    for (const char* key : {"utterance_id", "speaker_id", "kind", "values"}) {
      if (!entry.contains(key)) fail(where + ": missing '" + key + "'");
    }
    if (!entry["utterance_id"].is_string() || !entry["speaker_id"].is_string() ||
        !entry["kind"].is_string() || !entry["values"].is_array())
      fail(where + ": wrong field type");
    UtteranceRecord rec;
    rec.utterance_id = entry["utterance_id"].get<std::string>();
    rec.speaker_id = entry["speaker_id"].get<std::string>();
    if (!seen.insert(rec.utterance_id).second)
      fail(where + ": duplicate utterance_id '" + rec.utterance_id + "'");
    rec.feature.kind = parse_feature_kind(entry["kind"].get<std::string>());
    const auto& values = entry["values"];
    if (values.empty()) fail(where + ": empty values");
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (!values[c].is_number())
        fail(where + " ('" + rec.utterance_id + "') value " + std::to_string(c) +
             ": not a number");
      rec.feature.values.push_back(values[c].get<double>());
    }
    if (rec.feature.kind == FeatureKind::kHistogram)
      normalise_loaded_histogram(rec.feature.values, where);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<UtteranceRecord> load_features(const std::filesystem::path& path,
                                           FeatureFormat format, FeatureKind csv_kind) {
  switch (format) {
    case FeatureFormat::kCsv:
      return load_features_csv(path, csv_kind);
    case FeatureFormat::kJsonManifest:
      return load_features_json(path);
    case FeatureFormat::kF0FramesCsv: {
      CorpusDiagnostics unused;
      const auto edges = default_f0_bin_edges();
      return load_f0_frames(path, edges, unused);
    }
  }
  fail("unsupported feature format");
}

// ---------------------------------------------------------------------------

std::vector<double> default_f0_bin_edges(F0Range range) {
  constexpr int kBins = 107;
  std::vector<double> edges(kBins + 1);
  const double width = (range.max_hz - range.min_hz) / kBins;
  for (int i = 0; i <= kBins; ++i) edges[i] = range.min_hz + width * i;
  edges.back() = range.max_hz;
  return edges;
}

F0Histogram f0_histogram(std::span<const F0Frame> frames, std::span<const double> bin_edges,
                         F0Range range) {
  if (bin_edges.size() < 2) fail("F0 histogram needs at least two bin edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1])) fail("F0 bin edges must be strictly increasing");
  }
  if (bin_edges.front() < range.min_hz || bin_edges.back() > range.max_hz) {
    std::ostringstream os;
    os << "F0 bin edges must lie within [" << range.min_hz << ", " << range.max_hz << "] Hz";
    fail(os.str());
  }

  F0Histogram out;
  std::vector<std::size_t> counts(bin_edges.size() - 1, 0);
  std::size_t total = 0;
  for (const F0Frame& frame : frames) {
    if (!frame.voiced) {
      ++out.unvoiced_dropped;
      continue;
    }
    if (!std::isfinite(frame.f0_hz) || frame.f0_hz < bin_edges.front() ||
        frame.f0_hz > bin_edges.back()) {
      ++out.out_of_range_dropped;
      continue;
    }
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), frame.f0_hz);
    std::size_t bin = static_cast<std::size_t>(it - bin_edges.begin());
    bin = bin == bin_edges.size() ? counts.size() - 1 : bin - 1;
    ++counts[bin];
    ++total;
  }
  if (total == 0) {
    throw EmptyF0Evidence(std::to_string(frames.size()) + " frames, none voiced within range");
  }
  out.feature.kind = FeatureKind::kHistogram;
  out.feature.values.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.feature.values[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

std::vector<UtteranceRecord> load_f0_frames(const std::filesystem::path& path,
                                            std::span<const double> bin_edges,
                                            CorpusDiagnostics& diagnostics, F0Range range) {
  std::ifstream in = open_or_fail(path);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  // Keyed by utterance id; frames keep file order.
  std::map<std::string, std::pair<std::string, std::vector<F0Frame>>> utterances;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto fields = detail::split(row, ',');
    if (!have_header) {
      if (fields.size() != 4 || detail::trim(fields[0]) != "utterance_id" ||
          detail::trim(fields[1]) != "speaker_id" || detail::trim(fields[2]) != "f0_hz" ||
          detail::trim(fields[3]) != "voiced")
        fail(locus(path, line_no) + ": header must be utterance_id,speaker_id,f0_hz,voiced");
      have_header = true;
      continue;
    }
    if (fields.size() != 4)
      fail(locus(path, line_no) + ": expected 4 fields, got " + std::to_string(fields.size()));
    const std::string utt(detail::trim(fields[0]));
    const std::string spk(detail::trim(fields[1]));
    const auto f0 = detail::parse_double(fields[2]);
    const auto voiced = detail::trim(fields[3]);
    if (!f0) fail(locus(path, line_no) + ": utterance '" + utt + "' f0_hz is not a number");
    if (voiced != "0" && voiced != "1")
      fail(locus(path, line_no) + ": utterance '" + utt + "' voiced must be 0 or 1");
    auto& [speaker, frames] = utterances[utt];
    if (speaker.empty()) speaker = spk;
    if (speaker != spk)
      fail(locus(path, line_no) + ": utterance '" + utt + "' changes speaker");
    frames.push_back(F0Frame{*f0, voiced == "1"});
  }
  if (!have_header) fail(path.string() + ": empty file");
  if (utterances.empty()) fail(path.string() + ": no data rows");

  std::vector<UtteranceRecord> records;
  for (auto& [utt, entry] : utterances) {
    auto& [speaker, frames] = entry;
    try {
      F0Histogram h = f0_histogram(frames, bin_edges, range);
      diagnostics.unvoiced_frames_dropped += h.unvoiced_dropped;
      diagnostics.out_of_range_frames_dropped += h.out_of_range_dropped;
      records.push_back(UtteranceRecord{utt, speaker, std::move(h.feature)});
    } catch (const EmptyF0Evidence& e) {
      for (const auto& f : frames) {
        if (!f.voiced)
          ++diagnostics.unvoiced_frames_dropped;
        else
          ++diagnostics.out_of_range_frames_dropped;
      }
      diagnostics.excluded_utterances.push_back({utt, speaker, "empty F0 evidence"});
    }
  }
  if (records.empty()) fail(path.string() + ": every utterance lacks F0 evidence");
  return records;
}

// ---------------------------------------------------------------------------

std::vector<double> mean_vector(std::span<const FeatureVector> features) {
  if (features.empty()) fail("mean of zero vectors");
  std::vector<double> mean = features.front().values;
  for (std::size_t k = 1; k < features.size(); ++k) {
    const auto& v = features[k].values;
    const double scale = 1.0 / static_cast<double>(k + 1);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (v[i] - mean[i]) * scale;
  }
  return mean;
}

std::map<std::string, std::size_t> tally_speakers(std::span<const UtteranceRecord> records) {
  std::map<std::string, std::size_t> tally;
  for (const auto& r : records) ++tally[r.speaker_id];
  return tally;
}

std::vector<UtteranceRecord> filter_eligible_speakers(std::span<const UtteranceRecord> records,
                                                      const CohortPolicy& policy,
                                                      CorpusDiagnostics& diagnostics) {
  const auto tally = tally_speakers(records);
  const auto needed = static_cast<std::size_t>(std::max(0, policy.references_per_speaker) +
                                               std::max(0, policy.min_inputs_per_speaker));
  std::vector<UtteranceRecord> kept;
  for (const auto& r : records) {
    const std::size_t have = tally.at(r.speaker_id);
    if (have >= needed) {
      kept.push_back(r);
    } else {
      diagnostics.excluded_utterances.push_back(
          {r.utterance_id, r.speaker_id,
           "speaker has " + std::to_string(have) + " utterances; policy needs " +
               std::to_string(needed)});
    }
  }
  return kept;
}

Cohort build_cohort(std::span<const UtteranceRecord> records, const CohortPolicy& policy) {
  if (policy.references_per_speaker < 1) fail("references_per_speaker must be >= 1");
  if (policy.min_inputs_per_speaker < 0) fail("min_inputs_per_speaker must be >= 0");
  if (records.empty()) fail("no records to build a cohort from");

  const FeatureKind kind = records.front().feature.kind;
  const std::size_t dim = records.front().feature.dim();
  std::map<std::string, std::vector<const UtteranceRecord*>> by_speaker;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (r.feature.kind != kind) fail("mixed feature kinds ('" + r.utterance_id + "')");
    if (r.feature.dim() != dim)
      fail("mixed feature dimensions: '" + r.utterance_id + "' has " +
           std::to_string(r.feature.dim()) + ", expected " + std::to_string(dim));
    if (!seen.insert(r.utterance_id).second)
      fail("duplicate utterance_id '" + r.utterance_id + "'");
    by_speaker[r.speaker_id].push_back(&r);
  }

  const auto reserve = static_cast<std::size_t>(policy.references_per_speaker);
  const auto needed = reserve + static_cast<std::size_t>(policy.min_inputs_per_speaker);
  Cohort cohort;
  for (auto& [speaker, utts] : by_speaker) {
    if (utts.size() < needed) {
      fail("speaker '" + speaker + "' has " + std::to_string(utts.size()) +
           " utterances; policy needs " + std::to_string(needed));
    }
    std::sort(utts.begin(), utts.end(),
              [](const auto* a, const auto* b) { return a->utterance_id < b->utterance_id; });

    CounterRng rng(policy.shuffle_seed, detail::fnv1a(speaker));
    for (std::size_t j = 0; j < reserve; ++j) {
      const std::size_t k = j + static_cast<std::size_t>(rng.below(utts.size() - j));
      std::swap(utts[j], utts[k]);
    }
    std::vector<const UtteranceRecord*> reserved(utts.begin(), utts.begin() + reserve);
    std::sort(reserved.begin(), reserved.end(),
              [](const auto* a, const auto* b) { return a->utterance_id < b->utterance_id; });

    Reference ref;
    ref.speaker_id = speaker;
    for (const auto* r : reserved) ref.source_utterances.push_back(r->utterance_id);

    if (policy.aggregation == Aggregation::kMean) {
      std::vector<FeatureVector> features;
      for (const auto* r : reserved) features.push_back(r->feature);
      ref.feature = finalise_reference(mean_vector(features), kind, speaker);
    } else {
      std::size_t best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < reserved.size(); ++a) {
        double cost = 0.0;
        for (std::size_t b = 0; b < reserved.size(); ++b) {
          if (a == b) continue;
          const auto& x = reserved[a]->feature.values;
          const auto& y = reserved[b]->feature.values;
          cost += kind == FeatureKind::kHistogram ? std::sqrt(squared_distance(x, y))
                                                  : cosine_distance(x, y);
        }
        if (cost < best_cost) {
          best_cost = cost;
          best = a;
        }
      }
      ref.feature = reserved[best]->feature;
    }
    cohort.references.push_back(std::move(ref));

    std::vector<const UtteranceRecord*> rest(utts.begin() + reserve, utts.end());
    std::sort(rest.begin(), rest.end(),
              [](const auto* a, const auto* b) { return a->utterance_id < b->utterance_id; });
    for (const auto* r : rest) cohort.inputs.push_back(*r);
  }
  validate(cohort);
  return cohort;
}

void write_features_csv(std::ostream& out, std::span<const UtteranceRecord> records) {
  if (records.empty()) return;
  out << "utterance_id,speaker_id";
  for (std::size_t i = 0; i < records.front().feature.dim(); ++i) out << ",f" << i;
  out << '\n';
  char buf[32];
  for (const auto& r : records) {
    out << r.utterance_id << ',' << r.speaker_id;
    for (double v : r.feature.values) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

}  // namespace srd
