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

#include "srd/simulator.hpp"

#include <cmath>
#include <cstdio>

#include "srd/error.hpp"
#include "srd/random.hpp"

namespace srd {
namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("simulator", message); }

std::string numbered(const char* prefix, int value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, value);
  return buf;
}

}  // namespace

void validate(const SynthConfig& c) {
  if (c.n_speakers < 2) fail("n_speakers must be >= 2");
  if (c.utterances_per_speaker < 2) fail("utterances_per_speaker must be >= 2");
  if (c.dim < 1) fail("dim must be >= 1");
  if (!(c.between_speaker_std >= 0.0) || !std::isfinite(c.between_speaker_std))
    fail("between_speaker_std must be >= 0");
  if (!(c.within_speaker_std > 0.0) || !std::isfinite(c.within_speaker_std))
    fail("within_speaker_std must be > 0");
  if (!(c.anonymisation_strength >= 0.0 && c.anonymisation_strength <= 1.0))
    fail("anonymisation_strength must lie in [0, 1]");
}

std::vector<UtteranceRecord> synth_records(const SynthConfig& config) {
  validate(config);
  const auto dim = static_cast<std::size_t>(config.dim);
  const double s = config.anonymisation_strength;
  std::vector<UtteranceRecord> out;
  out.reserve(static_cast<std::size_t>(config.n_speakers) *
              static_cast<std::size_t>(config.utterances_per_speaker));
  std::vector<double> centroid(dim);
  for (int spk = 0; spk < config.n_speakers; ++spk) {
    CounterRng rng(derive_seed(config.seed, static_cast<std::uint64_t>(spk)));
    for (auto& c : centroid) c = config.between_speaker_std * rng.normal();
    const std::string speaker = numbered("spk", spk);
    for (int u = 0; u < config.utterances_per_speaker; ++u) {
      UtteranceRecord rec;
      rec.speaker_id = speaker;
      rec.utterance_id = speaker + numbered("_utt", u);
      rec.feature.kind = FeatureKind::kEmbedding;
      rec.feature.values.resize(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        const double population = config.between_speaker_std * rng.normal();
        const double noise = config.within_speaker_std * rng.normal();
        rec.feature.values[d] = (1.0 - s) * centroid[d] + s * population + noise;
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

RankDistribution synth_rank_samples(double alpha, double beta, std::size_t n_references,
                                    std::size_t n_samples, std::uint64_t seed) {
  if (!(alpha > 0.0) || !(beta > 0.0)) fail("alpha and beta must be positive");
  if (n_references < 1) fail("n_references must be >= 1");
  if (n_samples < 1) fail("n_samples must be >= 1");
  CounterRng rng(seed);
  std::vector<std::int64_t> counts(n_references, 0);
  for (std::size_t m = 0; m < n_samples; ++m) {
    const double p = rng.beta(alpha, beta);
    std::size_t successes = 0;
    for (std::size_t t = 0; t + 1 < n_references; ++t) {
      if (rng.uniform() < p) ++successes;
    }
    ++counts[successes];
  }
  return RankDistribution::from_counts(std::move(counts));
}

}  // namespace srd
