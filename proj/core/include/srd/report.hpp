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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srd/evaluation.hpp"

namespace srd {

inline constexpr int kReportSchemaVersion = 1;

/// Rounds to 6 significant digits; every real in a report goes through this.
double round_significant(double value);

/// Canonical report: sorted keys, reals at 6 significant digits, no
/// timestamps. Identical runs give byte-identical text.
std::string report_to_json(std::span<const EvaluationRun> runs);

/// Reads runs back from report_to_json output. Rank counts are exact; the
/// summary and model values carry the report's rounding.
std::vector<EvaluationRun> report_from_json(std::string_view text);

std::string diagnostics_to_json(const Evaluation& evaluation);

struct ComparisonRow {
  std::string system;
  std::string representation;
  GammaSource gamma_source = GammaSource::kEmpirical;
  double max_d_bits = 0.0;
  double mean_d_bits = 0.0;
  double idr_percent = 0.0;
  double rank_spread_percent = 0.0;
  std::optional<double> eer_percent;
};

struct ComparisonTable {
  std::size_t n_references = 0;
  std::vector<ComparisonRow> rows;  // in input order
};

/// Throws srd::Error when runs disagree on N.
ComparisonTable compare(std::span<const EvaluationRun> runs);

/// Header `system,representation,gamma_source,MaxD↓,MeanD↓,IdR↓,RS↑,EER↑`.
std::string comparison_to_csv(const ComparisonTable& table);
std::string comparison_to_text(const ComparisonTable& table);

/// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace srd
