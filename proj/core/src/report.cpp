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

#include "srd/report.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "srd/error.hpp"

namespace srd {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw Error("cli_report", message); }

json real(double v) { return json(round_significant(v)); }

json reals(std::span<const double> values) {
  json out = json::array();
  for (double v : values) out.push_back(real(v));
  return out;
}

GammaSource parse_gamma_source(const std::string& s) {
  if (s == "empirical") return GammaSource::kEmpirical;
  if (s == "betabinomial") return GammaSource::kBetaBinomial;
  fail("unknown gamma_source '" + s + "'");
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s = buf;
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

}  // namespace

double round_significant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::string report_to_json(std::span<const EvaluationRun> runs) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool"] = "srd";
  doc["constraint_form"] = std::string(kConstraintForm);
  json out_runs = json::array();
  for (const auto& run : runs) {
    json r;
    r["system"] = run.system_label;
    r["representation"] = run.representation_label;
    r["measure"] = std::string(to_string(run.measure));
    r["cohort_fingerprint"] = run.cohort_fingerprint;
    r["gamma_source"] = std::string(to_string(run.summary.gamma_source));
    r["max_d_bits"] = real(run.summary.max_disclosure);
    r["mean_d_bits"] = real(run.summary.mean_disclosure);
    r["idr_percent"] = real(run.summary.identification_rate);
    r["rank_spread_percent"] = real(run.summary.rank_spread);
    r["eer_percent"] = run.eer_percent ? real(*run.eer_percent) : json(nullptr);
    r["n_references"] = run.rank_distribution.n_references();
    r["n_inputs"] = run.n_inputs;
    const auto counts = run.rank_distribution.counts();
    r["rank_counts"] = std::vector<std::int64_t>(counts.begin(), counts.end());
    r["rank_probabilities"] = reals(run.rank_distribution.probabilities());
    if (run.model) {
      json m;
      m["alpha"] = real(run.model->alpha);
      m["beta"] = real(run.model->beta);
      m["n_references"] = run.model->n_references;
      m["gamma"] = reals(run.model->gamma);
      m["loss"] = real(run.model->loss);
      m["iterations"] = run.model->iterations;
      r["model"] = std::move(m);
    }
    out_runs.push_back(std::move(r));
  }
  doc["runs"] = std::move(out_runs);
  return doc.dump(2) + "\n";
}

std::vector<EvaluationRun> report_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("report: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array())
    fail("report: missing 'runs' array");
  if (!doc.contains("schema_version") || doc["schema_version"] != kReportSchemaVersion)
    fail("report: unsupported schema_version (expected " + std::to_string(kReportSchemaVersion) + ")");
  std::vector<EvaluationRun> runs;
  try {
    for (const auto& r : doc["runs"]) {
      EvaluationRun run;
      run.system_label = r.at("system").get<std::string>();
      run.representation_label = r.at("representation").get<std::string>();
      run.measure = parse_measure(r.at("measure").get<std::string>());
      run.cohort_fingerprint = r.at("cohort_fingerprint").get<std::string>();
      run.summary.gamma_source = parse_gamma_source(r.at("gamma_source").get<std::string>());
      run.summary.max_disclosure = r.at("max_d_bits").get<double>();
      run.summary.mean_disclosure = r.at("mean_d_bits").get<double>();
      run.summary.identification_rate = r.at("idr_percent").get<double>();
      run.summary.rank_spread = r.at("rank_spread_percent").get<double>();
      if (!r.at("eer_percent").is_null()) run.eer_percent = r.at("eer_percent").get<double>();
      run.n_inputs = r.at("n_inputs").get<std::size_t>();
      run.rank_distribution =
          RankDistribution::from_counts(r.at("rank_counts").get<std::vector<std::int64_t>>());
      if (run.rank_distribution.n_references() != r.at("n_references").get<std::size_t>())
        fail("report: rank_counts length disagrees with n_references");
      if (r.contains("model")) {
        const auto& m = r["model"];
        BetaBinomialModel model;
        model.alpha = m.at("alpha").get<double>();
        model.beta = m.at("beta").get<double>();
        model.n_references = m.at("n_references").get<std::size_t>();
        model.gamma = m.at("gamma").get<std::vector<double>>();
        model.loss = m.at("loss").get<double>();
        model.iterations = m.at("iterations").get<int>();
        run.model = std::move(model);
      }
      runs.push_back(std::move(run));
    }
  } catch (const json::exception& e) {
    fail(std::string("report: ") + e.what());
  }
  return runs;
}

std::string diagnostics_to_json(const Evaluation& ev) {
  json doc;
  doc["unvoiced_frames_dropped"] = ev.corpus.unvoiced_frames_dropped;
  doc["out_of_range_frames_dropped"] = ev.corpus.out_of_range_frames_dropped;
  json excluded = json::array();
  for (const auto& e : ev.corpus.excluded_utterances)
    excluded.push_back({{"utterance_id", e.utterance_id},
                        {"speaker_id", e.speaker_id},
                        {"reason", e.reason}});
  doc["excluded_utterances"] = std::move(excluded);
  json tally = json::object();
  for (const auto& [speaker, n] : ev.corpus.utterances_per_speaker) tally[speaker] = n;
  doc["utterances_per_speaker"] = std::move(tally);
  doc["tied_inputs"] = ev.tied_inputs;
  doc["eer_degenerate"] = ev.eer_degenerate;
  return doc.dump(2) + "\n";
}

ComparisonTable compare(std::span<const EvaluationRun> runs) {
  if (runs.empty()) fail("nothing to compare");
  ComparisonTable table;
  table.n_references = runs.front().rank_distribution.n_references();
  for (const auto& run : runs) {
    const std::size_t n = run.rank_distribution.n_references();
    if (n != table.n_references)
      fail("run '" + run.system_label + "/" + run.representation_label + "' has N = " +
           std::to_string(n) + ", expected " + std::to_string(table.n_references));
    table.rows.push_back(ComparisonRow{run.system_label, run.representation_label,
                                       run.summary.gamma_source, run.summary.max_disclosure,
                                       run.summary.mean_disclosure,
                                       run.summary.identification_rate, run.summary.rank_spread,
                                       run.eer_percent});
  }
  return table;
}

std::string comparison_to_csv(const ComparisonTable& table) {
  std::ostringstream os;
  os << "system,representation,gamma_source,MaxD↓,MeanD↓,IdR↓,RS↑,EER↑\n";
  for (const auto& r : table.rows) {
    os << r.system << ',' << r.representation << ',' << to_string(r.gamma_source) << ','
       << format_fixed(r.max_d_bits, 2) << ',' << format_fixed(r.mean_d_bits, 2) << ','
       << format_fixed(r.idr_percent, 2) << ',' << format_fixed(r.rank_spread_percent, 2) << ','
       << (r.eer_percent ? format_fixed(*r.eer_percent, 2) : std::string()) << '\n';
  }
  return os.str();
}

std::string comparison_to_text(const ComparisonTable& table) {
  std::vector<std::array<std::string, 8>> cells;
  cells.push_back({"System", "Representation", "Source", "MaxD↓", "MeanD↓", "IdR(%)↓", "RS(%)↑",
                   "EER(%)↑"});
  for (const auto& r : table.rows) {
    cells.push_back({r.system, r.representation, std::string(to_string(r.gamma_source)),
                     format_fixed(r.max_d_bits, 2), format_fixed(r.mean_d_bits, 2),
                     format_fixed(r.idr_percent, 2), format_fixed(r.rank_spread_percent, 2),
                     r.eer_percent ? format_fixed(*r.eer_percent, 2) : "--"});
  }
  // Display width: count code points, not bytes, so the arrows line up.
  auto width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
  };
  std::array<std::size_t, 8> widths{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));

  std::ostringstream os;
  os << "N = " << table.n_references << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t c = 0; c < cells[i].size(); ++c) {
      const std::string& s = cells[i][c];
      const std::string pad(widths[c] - width(s), ' ');
      if (c < 3)
        os << s << pad;
      else
        os << pad << s;
      os << (c + 1 < cells[i].size() ? "  " : "\n");
    }
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w + 2;
      os << std::string(total - 2, '-') << '\n';
    }
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace srd
