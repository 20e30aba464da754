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

// srd: command-line front end for similarity rank disclosure evaluation.
//
//   srd synth   --speakers 40 --utterances 20 --strength 0.5 --out-dir fx
//   srd eval    --features fx/features.csv --system B5 --representation ET --out-dir out
//   srd compare out/a/report.json out/b/report.json --out-dir out
//   srd plot    --report out/report.json --overlay other/report.json
//   srd fit     --ranks counts.json

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srd/corpus.hpp"
#include "srd/error.hpp"
#include "srd/evaluation.hpp"
#include "srd/plot.hpp"
#include "srd/rankmodel.hpp"
#include "srd/report.hpp"
#include "srd/simulator.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string measure = "cosine";
  std::string mode = "both";
  fs::path out_dir = ".";
  std::optional<fs::path> policy_file;
};

srd::RunConfig load_config(const GlobalFlags& g) {
  srd::RunConfig config = g.policy_file ? srd::load_run_config(*g.policy_file) : srd::RunConfig{};
  if (g.seed) config.policy.shuffle_seed = *g.seed;
  return config;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw srd::Error("cli_report", "cannot create " + dir.string() + ": " + ec.message());
}

struct EvalFlags {
  fs::path features;
  std::string format = "csv";
  std::string kind = "embedding";
  std::string system = "system";
  std::string representation = "representation";
  bool no_eer = false;
  bool drop_ineligible = false;
};

int cmd_eval(const GlobalFlags& g, const EvalFlags& f) {
  srd::EvaluationOptions options;
  options.system_label = f.system;
  options.representation_label = f.representation;
  options.measure = srd::parse_measure(g.measure);
  options.mode = srd::parse_mode(g.mode);
  options.compute_eer = !f.no_eer;
  options.drop_ineligible_speakers = f.drop_ineligible;
  options.config = load_config(g);

  const srd::Evaluation ev = srd::run_evaluation(f.features, srd::parse_feature_format(f.format),
                                                 srd::parse_feature_kind(f.kind), options);

  // Render everything before touching the output directory.
  const std::string report = srd::report_to_json(ev.runs);
  srd::PlotOptions plot_options;
  plot_options.title = f.system + " / " + f.representation;
  const std::string svg =
      srd::plot_rank_histogram(ev.runs.front().rank_distribution, nullptr, plot_options);
  std::ostringstream observations;
  srd::write_observations_csv(observations, ev.observations);
  const std::string diagnostics = srd::diagnostics_to_json(ev);

  ensure_dir(g.out_dir);
  srd::write_file_atomic(g.out_dir / "report.json", report);
  srd::write_file_atomic(g.out_dir / "rank_histogram.svg", svg);
  srd::write_file_atomic(g.out_dir / "observations.csv", observations.str());
  srd::write_file_atomic(g.out_dir / "diagnostics.json", diagnostics);

  const srd::ComparisonTable table = srd::compare(ev.runs);
  std::cout << srd::comparison_to_text(table);
  return 0;
}

int cmd_compare(const GlobalFlags& g, const std::vector<fs::path>& reports) {
  std::vector<srd::EvaluationRun> runs;
  for (const auto& path : reports) {
    auto more = srd::report_from_json(srd::read_file(path));
    runs.insert(runs.end(), std::make_move_iterator(more.begin()),
                std::make_move_iterator(more.end()));
  }
  const srd::ComparisonTable table = srd::compare(runs);
  const std::string csv = srd::comparison_to_csv(table);
  const std::string text = srd::comparison_to_text(table);
  ensure_dir(g.out_dir);
  srd::write_file_atomic(g.out_dir / "comparison.csv", csv);
  srd::write_file_atomic(g.out_dir / "comparison.txt", text);
  std::cout << text;
  return 0;
}

struct PlotFlags {
  fs::path report;
  std::optional<fs::path> overlay;
  std::size_t run_index = 0;
  bool no_chance_line = false;
  std::string output = "rank_histogram.svg";
  std::string title;
};

srd::EvaluationRun pick_run(const fs::path& path, std::size_t index) {
  auto runs = srd::report_from_json(srd::read_file(path));
  if (index >= runs.size())
    throw srd::Error("cli_report", path.string() + " has " + std::to_string(runs.size()) +
                                       " runs; index " + std::to_string(index) + " requested");
  return std::move(runs[index]);
}

int cmd_plot(const GlobalFlags& g, const PlotFlags& f) {
  const srd::EvaluationRun primary = pick_run(f.report, f.run_index);
  std::optional<srd::EvaluationRun> overlay;
  if (f.overlay) overlay = pick_run(*f.overlay, f.run_index);

  srd::PlotOptions options;
  options.title = f.title.empty()
                      ? primary.system_label + " / " + primary.representation_label
                      : f.title;
  options.primary_label = primary.system_label;
  if (overlay) options.overlay_label = overlay->system_label;
  options.chance_line = !f.no_chance_line;
  const std::string svg = srd::plot_rank_histogram(
      primary.rank_distribution, overlay ? &overlay->rank_distribution : nullptr, options);
  ensure_dir(g.out_dir);
  srd::write_file_atomic(g.out_dir / f.output, svg);
  return 0;
}

struct SynthFlags {
  srd::SynthConfig config;
  bool ranks = false;
  double alpha = 2.0;
  double beta = 5.0;
  std::size_t n_references = 40;
  std::size_t samples = 10000;
  std::string output;
};

int cmd_synth(const GlobalFlags& g, SynthFlags f) {
  if (g.seed) f.config.seed = *g.seed;
  ensure_dir(g.out_dir);
  if (f.ranks) {
    const srd::RankDistribution dist =
        srd::synth_rank_samples(f.alpha, f.beta, f.n_references, f.samples, f.config.seed);
    const auto counts = dist.counts();
    nlohmann::json doc;
    doc["counts"] = std::vector<std::int64_t>(counts.begin(), counts.end());
    srd::write_file_atomic(g.out_dir / (f.output.empty() ? "rank_counts.json" : f.output),
                           doc.dump() + "\n");
    return 0;
  }
  const auto records = srd::synth_records(f.config);
  std::ostringstream csv;
  srd::write_features_csv(csv, records);
  srd::write_file_atomic(g.out_dir / (f.output.empty() ? "features.csv" : f.output), csv.str());
  return 0;
}

int cmd_fit(const GlobalFlags& g, const fs::path& ranks) {
  const std::string text = srd::read_file(ranks);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw srd::Error("cli_report", ranks.string() + ": " + e.what());
  }
  srd::RankDistribution dist;
  if (doc.is_object() && doc.contains("counts") && doc["counts"].is_array()) {
    dist = srd::RankDistribution::from_counts(doc["counts"].get<std::vector<std::int64_t>>());
  } else if (doc.is_object() && doc.contains("runs")) {
    dist = srd::report_from_json(text).at(0).rank_distribution;
  } else {
    throw srd::Error("cli_report", ranks.string() + ": expected {\"counts\": [...]} or a report");
  }
  const srd::BetaBinomialModel model = srd::fit(dist, load_config(g).fit);
  const std::string json = srd::model_to_json(model);
  ensure_dir(g.out_dir);
  srd::write_file_atomic(g.out_dir / "model.json", json);
  std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity rank disclosure: rank-based speaker-identity leakage metrics"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Seed for cohort shuffling / synthesis");
  app.add_option("--measure", g.measure, "cosine | euclidean")
      ->check(CLI::IsMember({"cosine", "cosine_similarity", "euclidean", "negative_euclidean"}));
  app.add_option("--mode", g.mode, "empirical | betabinomial | both")
      ->check(CLI::IsMember({"empirical", "betabinomial", "both"}));
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--policy-file", g.policy_file, "Cohort policy / fit settings (JSON or key=value)")
      ->check(CLI::ExistingFile);

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Rank, model and summarise one feature set");
  eval_cmd->add_option("--features", eval.features, "Feature file")->required();
  eval_cmd->add_option("--format", eval.format, "csv | json | f0-frames")
      ->check(CLI::IsMember({"csv", "json", "json-manifest", "f0-frames"}));
  eval_cmd->add_option("--kind", eval.kind, "Kind of CSV rows: embedding | histogram")
      ->check(CLI::IsMember({"embedding", "histogram"}));
  eval_cmd->add_option("--system", eval.system, "System label");
  eval_cmd->add_option("--representation", eval.representation, "Representation label");
  eval_cmd->add_flag("--no-eer", eval.no_eer, "Skip the EER baseline");
  eval_cmd->add_flag("--drop-ineligible", eval.drop_ineligible,
                     "Exclude speakers with too few utterances instead of failing");

  std::vector<fs::path> reports;
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate several reports");
  compare_cmd->add_option("reports", reports, "report.json files")->required();

  PlotFlags plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render a rank histogram as SVG");
  plot_cmd->add_option("--report", plot.report, "Report to plot")->required();
  plot_cmd->add_option("--overlay", plot.overlay, "Second report drawn on top");
  plot_cmd->add_option("--run-index", plot.run_index, "Which run of each report");
  plot_cmd->add_flag("--no-chance-line", plot.no_chance_line, "Omit the 1/N line");
  plot_cmd->add_option("--output", plot.output, "File name inside --out-dir");
  plot_cmd->add_option("--title", plot.title, "Plot title");

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic features or rank samples");
  synth_cmd->add_option("--speakers", synth.config.n_speakers);
  synth_cmd->add_option("--utterances", synth.config.utterances_per_speaker);
  synth_cmd->add_option("--dim", synth.config.dim);
  synth_cmd->add_option("--between-std", synth.config.between_speaker_std);
  synth_cmd->add_option("--within-std", synth.config.within_speaker_std);
  synth_cmd->add_option("--strength", synth.config.anonymisation_strength,
                        "Anonymisation strength in [0, 1]");
  synth_cmd->add_flag("--ranks", synth.ranks, "Emit beta-binomial rank counts instead");
  synth_cmd->add_option("--alpha", synth.alpha);
  synth_cmd->add_option("--beta", synth.beta);
  synth_cmd->add_option("--n-references", synth.n_references);
  synth_cmd->add_option("--samples", synth.samples);
  synth_cmd->add_option("--output", synth.output, "File name inside --out-dir");

  fs::path ranks;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a beta-binomial model to rank counts");
  fit_cmd->add_option("--ranks", ranks, "{\"counts\": [...]} or report.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval_cmd) return cmd_eval(g, eval);
    if (*compare_cmd) return cmd_compare(g, reports);
    if (*plot_cmd) return cmd_plot(g, plot);
    if (*synth_cmd) return cmd_synth(g, synth);
    if (*fit_cmd) return cmd_fit(g, ranks);
  } catch (const srd::Error& e) {
    std::cerr << "srd: error [" << e.module() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "srd: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
