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

#include <cstdint>
#include <vector>

#include "srd/corpus.hpp"
#include "srd/ranking.hpp"

namespace srd {

/// Gaussian speaker population with a knob for anonymisation strength.
struct SynthConfig {
  int n_speakers = 40;
  int utterances_per_speaker = 20;
  int dim = 32;
  double between_speaker_std = 1.0;
  double within_speaker_std = 0.3;
  /// 0 leaves speaker centroids intact, 1 replaces them entirely.
  double anonymisation_strength = 0.0;
  std::uint64_t seed = 0;
};

void validate(const SynthConfig& config);

/// Utterance u of speaker s is
///   (1 - strength) * centroid_s + strength * g_{s,u} + noise_{s,u},
/// where centroid_s and g_{s,u} are independent N(0, between_std^2 I) draws
/// and noise_{s,u} ~ N(0, within_std^2 I). Speaker s draws only from its own
/// sub-stream of `seed`, so output is identical on every platform.
/// Ids are `spkNNN` and `spkNNN_uttNNN`.
std::vector<UtteranceRecord> synth_records(const SynthConfig& config);

/// M draws of rank = 1 + BetaBinomial(N - 1, alpha, beta), each sampled as
/// p ~ Beta(alpha, beta) followed by N - 1 Bernoulli(p) trials.
RankDistribution synth_rank_samples(double alpha, double beta, std::size_t n_references,
                                    std::size_t n_samples, std::uint64_t seed);

}  // namespace srd
