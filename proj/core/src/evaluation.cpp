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

#include "srd/evaluation.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "detail.hpp"
#include "srd/error.hpp"

namespace srd {
namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("cli_report", message); }

void apply_setting(RunConfig& config, const std::string& key, const nlohmann::json& value) {
  auto as_int = [&]() {
    if (value.is_number_integer()) return value.get<long long>();
    if (value.is_string()) {
      const auto d = detail::parse_double(value.get<std::string>());
      if (d && *d == static_cast<double>(static_cast<long long>(*d)))
        return static_cast<long long>(*d);
    }
    fail("config key '" + key + "' expects an integer");
  };
  auto as_double = [&]() {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
      if (const auto d = detail::parse_double(value.get<std::string>())) return *d;
    }
    fail("config key '" + key + "' expects a number");
  };
  auto as_string = [&]() {
    if (!value.is_string()) fail("config key '" + key + "' expects a string");
    return value.get<std::string>();
  };
  auto as_bool = [&]() {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_string()) {
      const auto s = value.get<std::string>();
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
    }
    fail("config key '" + key + "' expects true or false");
  };

  if (key == "references_per_speaker") {
    config.policy.references_per_speaker = static_cast<int>(as_int());
  } else if (key == "aggregation") {
    config.policy.aggregation = parse_aggregation(as_string());
  } else if (key == "min_inputs_per_speaker") {
    config.policy.min_inputs_per_speaker = static_cast<int>(as_int());
  } else if (key == "shuffle_seed") {
    config.policy.shuffle_seed = static_cast<std::uint64_t>(as_int());
  } else if (key == "rank1_penalty_weight") {
    config.fit.rank1_penalty_weight = as_double();
  } else if (key == "tolerance") {
    config.fit.tolerance = as_double();
  } else if (key == "max_iterations") {
    config.fit.max_iterations = static_cast<int>(as_int());
  } else if (key == "initializer") {
    const std::string s = as_string();
    if (s == "method_of_moments")
      config.fit.initializer = Initializer::kMethodOfMoments;
    else if (s == "fixed" || s == "uniform")
      config.fit.initializer = Initializer::kUniform;
    else
      fail("unknown initializer '" + s + "'");
  } else if (key == "multistart") {
    config.fit.multistart = as_bool();
  } else if (key == "mean_weighting") {
    const std::string s = as_string();
    if (s == "empirical")
      config.mean_weighting = MeanWeighting::kEmpirical;
    else if (s == "model")
      config.mean_weighting = MeanWeighting::kModel;
    else
      fail("unknown mean_weighting '" + s + "'");
  } else if (key == "f0_bin_edges") {
    config.f0_bin_edges.clear();
    if (value.is_array()) {
      for (const auto& v : value) {
        if (!v.is_number()) fail("f0_bin_edges must be numbers");
        config.f0_bin_edges.push_back(v.get<double>());
      }
    } else {
      for (auto field : detail::split(as_string(), ' ')) {
        if (detail::trim(field).empty()) continue;
        const auto d = detail::parse_double(field);
        if (!d) fail("f0_bin_edges must be numbers");
        config.f0_bin_edges.push_back(*d);
      }
    }
  } else {
    fail("unknown config key '" + key + "'");
  }
}

void hash_string(std::uint64_t& h, std::string_view s) {
  h = detail::fnv1a(s, h);
  h = detail::fnv1a(std::string_view("\0", 1), h);
}

void hash_values(std::uint64_t& h, const FeatureVector& f) {
  hash_string(h, to_string(f.kind));
  for (double v : f.values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    h = detail::fnv1a(std::string_view(bytes, 8), h);
  }
}

}  // namespace

std::string_view to_string(EvaluationMode mode) {
  switch (mode) {
    case EvaluationMode::kEmpirical:
      return "empirical";
    case EvaluationMode::kBetaBinomial:
      return "betabinomial";
    case EvaluationMode::kBoth:
      return "both";
  }
  return "both";
}

EvaluationMode parse_mode(std::string_view text) {
  if (text == "empirical") return EvaluationMode::kEmpirical;
  if (text == "betabinomial") return EvaluationMode::kBetaBinomial;
  if (text == "both") return EvaluationMode::kBoth;
  fail("unknown mode '" + std::string(text) + "'");
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  const std::string_view body = detail::trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("config: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) apply_setting(config, key, value);
    return config;
  }
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = line;
    if (const auto hash = row.find('#'); hash != std::string_view::npos) row = row.substr(0, hash);
    row = detail::trim(row);
    if (row.empty()) continue;
    const auto eq = row.find('=');
    if (eq == std::string_view::npos)
      fail("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(row.substr(0, eq)));
    const std::string value(detail::trim(row.substr(eq + 1)));
    apply_setting(config, key, nlohmann::json(value));
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open policy file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string cohort_fingerprint(const Cohort& cohort) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& ref : cohort.references) {
    hash_string(h, "ref");
    hash_string(h, ref.speaker_id);
    for (const auto& u : ref.source_utterances) hash_string(h, u);
    hash_values(h, ref.feature);
  }
  for (const auto& in : cohort.inputs) {
    hash_string(h, "input");
    hash_string(h, in.utterance_id);
    hash_string(h, in.speaker_id);
    hash_values(h, in.feature);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Evaluation evaluate_cohort(const Cohort& cohort, const EvaluationOptions& options) {
  validate(cohort);
  Evaluation ev;
  RankingResult ranking = rank_all(cohort, options.measure);
  ev.tied_inputs = ranking.tied_inputs;
  RankDistribution dist =
      RankDistribution::from_observations(ranking.observations, cohort.n_references());
  ev.observations = std::move(ranking.observations);

  std::optional<double> eer_percent;
  if (options.compute_eer && cohort.n_references() >= 2) {
    const EerResult r = compute_eer(score_cohort_trials(cohort, options.measure));
    eer_percent = r.eer_percent;
    ev.eer_degenerate = r.degenerate;
  }

  EvaluationRun base;
  base.system_label = options.system_label;
  base.representation_label = options.representation_label;
  base.measure = options.measure;
  base.cohort_fingerprint = cohort_fingerprint(cohort);
  base.rank_distribution = dist;
  base.eer_percent = eer_percent;
  base.n_inputs = cohort.inputs.size();

  if (options.mode != EvaluationMode::kBetaBinomial) {
    EvaluationRun run = base;
    run.summary = summarize(dist);
    ev.runs.push_back(std::move(run));
  }
  if (options.mode != EvaluationMode::kEmpirical) {
    EvaluationRun run = base;
    run.model = fit(dist, options.config.fit);
    run.summary = summarize(dist, *run.model, options.config.mean_weighting);
    ev.runs.push_back(std::move(run));
  }
  return ev;
}

Evaluation run_evaluation(const std::filesystem::path& features_path, FeatureFormat format,
                          FeatureKind csv_kind, const EvaluationOptions& options) {
  CorpusDiagnostics diagnostics;
  std::vector<UtteranceRecord> records;
  if (format == FeatureFormat::kF0FramesCsv) {
    const std::vector<double> edges = options.config.f0_bin_edges.empty()
                                          ? default_f0_bin_edges()
                                          : options.config.f0_bin_edges;
    records = load_f0_frames(features_path, edges, diagnostics);
  } else {
    records = load_features(features_path, format, csv_kind);
  }
  diagnostics.utterances_per_speaker = tally_speakers(records);
  if (options.drop_ineligible_speakers)
    records = filter_eligible_speakers(records, options.config.policy, diagnostics);
  const Cohort cohort = build_cohort(records, options.config.policy);
  Evaluation ev = evaluate_cohort(cohort, options);
  ev.corpus = std::move(diagnostics);
  return ev;
}

}  // namespace srd
