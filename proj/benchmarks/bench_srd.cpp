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

#include <benchmark/benchmark.h>

#include "srd/metrics.hpp"
#include "srd/rankmodel.hpp"
#include "srd/ranking.hpp"
#include "srd/simulator.hpp"

namespace {

srd::Cohort make_cohort(int speakers, int utterances, int dim) {
  srd::SynthConfig cfg;
  cfg.n_speakers = speakers;
  cfg.utterances_per_speaker = utterances;
  cfg.dim = dim;
  cfg.anonymisation_strength = 0.5;
  cfg.seed = 1;
  return srd::build_cohort(srd::synth_records(cfg), {});
}

void BM_RankAll(benchmark::State& state) {
  const auto cohort = make_cohort(static_cast<int>(state.range(0)), 50, 256);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    auto r = srd::rank_all(cohort, srd::SimilarityMeasure::kCosineSimilarity, threads);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cohort.inputs.size() * cohort.n_references()));
}
BENCHMARK(BM_RankAll)->Args({40, 1})->Args({40, 0})->Args({400, 1})->Args({400, 0})->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto dist = srd::synth_rank_samples(2.0, 5.0, static_cast<std::size_t>(state.range(0)), 10000, 3);
  for (auto _ : state) {
    auto m = srd::fit(dist);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_Fit)->Arg(40)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_BetaBinomialPmf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto g = srd::betabinom_pmf(2.0, 5.0, n);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_BetaBinomialPmf)->Arg(40)->Arg(4000);

void BM_Eer(benchmark::State& state) {
  const auto cohort = make_cohort(100, 20, 64);
  const auto trials = srd::score_cohort_trials(cohort, srd::SimilarityMeasure::kCosineSimilarity);
  for (auto _ : state) {
    auto r = srd::compute_eer(trials);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(trials.target_scores.size() + trials.nontarget_scores.size()));
}
BENCHMARK(BM_Eer)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
