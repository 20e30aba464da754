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

#include <string>

#include "srd/ranking.hpp"

namespace srd {

struct PlotOptions {
  std::string title;
  std::string primary_label = "observed";
  std::string overlay_label = "overlay";
  bool chance_line = true;
  int width = 640;
  int height = 360;
};

/// Standalone SVG bar chart of p~_k over ranks 1..N. An overlay is drawn on
/// top at half opacity; the chance line sits at 1/N. Output depends only on
/// the arguments.
std::string plot_rank_histogram(const RankDistribution& dist, const RankDistribution* overlay,
                                const PlotOptions& options = {});

}  // namespace srd
