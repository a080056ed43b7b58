// Copyright 2026 The sdkpriv Authors.
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "sdkpriv/bundled.hpp"
#include "sdkpriv/error.hpp"
#include "sdkpriv/harness.hpp"

using namespace sdkpriv;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kCorpus = 2 };

struct ScorerFlags {
  std::string url;
  std::string fixtures;
  int connections = 4;
};

void add_scorer_flags(CLI::App* cmd, ScorerFlags& f) {
  auto* url = cmd->add_option("--scorer", f.url, "scorer service URL (overrides " +
                                                     std::string(kScorerUrlEnv) + ")");
  auto* fix = cmd->add_option("--score-fixtures", f.fixtures, "recorded score file");
  url->excludes(fix);
  cmd->add_option("--scorer-connections", f.connections, "concurrent scorer requests")
      ->check(CLI::PositiveNumber);
}

std::unique_ptr<Scorer> make_scorer(const ScorerFlags& f) {
  if (!f.fixtures.empty()) {
    return std::make_unique<FixtureScorer>(FixtureScorer::from_file(f.fixtures));
  }
  auto url = f.url;
  if (url.empty()) {
    if (const char* env = std::getenv(kScorerUrlEnv)) {
      url = env;
    }
  }
  if (url.empty()) {
    return nullptr;
  }
  return std::make_unique<HttpScorer>(url, f.connections);
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError("cannot read '" + path.string() + "'");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorpusError("'" + path.string() + "': " + e.what());
  }
}

ComplianceReport read_report(fs::path path) {
  if (fs::is_directory(path)) {
    path /= "report.json";
  }
  auto doc = read_json_file(path);
  try {
    return report_from_json(doc);
  } catch (const CorpusError&) {
    throw;
  } catch (const Error& e) {
    throw CorpusError("'" + path.string() + "': " + e.what());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDK privacy compliance analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string ontology_path, catalog_path, lexicon_path;
  app.add_option("--ontology", ontology_path, "data type ontology (JSON)");
  app.add_option("--catalog", catalog_path, "source/sink catalog (JSON)");
  app.add_option("--lexicon", lexicon_path, "hypothesis verb lexicon (JSON)");

  auto* analyze_cmd = app.add_subcommand("analyze", "run the pipeline over a corpus manifest");
  std::string manifest_path, suppressions_path, out_dir, format = "table";
  double threshold = 0.73;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  bool settings_sinks = false;
  ScorerFlags analyze_scorer;
  analyze_cmd->add_option("manifest", manifest_path, "corpus manifest")->required();
  add_scorer_flags(analyze_cmd, analyze_scorer);
  analyze_cmd->add_option("--threshold", threshold, "entailment threshold");
  analyze_cmd->add_option("--suppressions", suppressions_path, "trace suppression list");
  analyze_cmd->add_option("--out", out_dir, "output directory");
  analyze_cmd->add_option("--format", format, "stdout format")
      ->check(CLI::IsMember({"json", "table"}));
  analyze_cmd->add_option("--jobs", jobs, "parallel entries")->check(CLI::PositiveNumber);
  analyze_cmd->add_flag("--settings-writes-as-sinks", settings_sinks,
                        "treat every settings write as a sink");

  auto* diff_cmd = app.add_subcommand("diff", "compare trace counts of two reports");
  std::string old_path, new_path;
  diff_cmd->add_option("old", old_path, "older report.json or output directory")->required();
  diff_cmd->add_option("new", new_path, "newer report.json or output directory")->required();

  auto* tune_cmd = app.add_subcommand("tune", "pick the entailment threshold");
  std::string labeled_path;
  ScorerFlags tune_scorer;
  tune_cmd->add_option("labeled", labeled_path, "labeled policy corpus")->required();
  add_scorer_flags(tune_cmd, tune_scorer);

  auto* metrics_cmd = app.add_subcommand("metrics", "score predicted claims against truth");
  std::string pred_path, truth_path, metrics_format = "table";
  metrics_cmd->add_option("pred", pred_path, "predicted claims")->required();
  metrics_cmd->add_option("truth", truth_path, "ground-truth claims")->required();
  metrics_cmd->add_option("--format", metrics_format, "output format")
      ->check(CLI::IsMember({"json", "table"}));

  CLI11_PARSE(app, argc, argv);

  try {
    Ontology custom_onto;
    const Ontology* onto = &default_ontology();
    if (!ontology_path.empty()) {
      custom_onto = load_ontology_file(ontology_path);
      onto = &custom_onto;
    }
    auto load_policy = [&](double t) {
      if (lexicon_path.empty() && ontology_path.empty()) {
        auto cfg = default_policy_config();
        if (!(t > 0.0 && t <= 1.0)) {
          throw ConfigError("threshold must lie in (0, 1]");
        }
        cfg.threshold = t;
        return cfg;
      }
      nlohmann::json doc;
      try {
        doc = lexicon_path.empty() ? nlohmann::json::parse(bundled::lexicon_json())
                                   : read_json_file(lexicon_path);
      } catch (const CorpusError& e) {
        throw ConfigError(e.what());
      }
      return load_policy_config(doc, *onto, t);
    };

    if (*analyze_cmd) {
      TaintCatalog custom_cat;
      const TaintCatalog* catalog = &default_catalog();
      if (!catalog_path.empty() || !ontology_path.empty()) {
        custom_cat = catalog_path.empty()
                         ? load_catalog(nlohmann::json::parse(bundled::catalog_json()), *onto)
                         : load_catalog_file(catalog_path, *onto);
        catalog = &custom_cat;
      }
      RunConfig cfg;
      cfg.ontology = onto;
      cfg.catalog = catalog;
      cfg.policy = load_policy(threshold);
      cfg.analysis.settings_writes_as_sinks = settings_sinks;
      if (!suppressions_path.empty()) {
        cfg.suppressions = load_suppressions_file(suppressions_path);
      }
      auto scorer = make_scorer(analyze_scorer);
      cfg.scorer = scorer.get();
      cfg.jobs = jobs;
      auto manifest = load_manifest(manifest_path);
      auto run = run_corpus(manifest, cfg);
      if (!out_dir.empty()) {
        emit_report(run, out_dir);
      }
      std::cout << (format == "json" ? dump_canonical(to_json(run.report))
                                     : format_report_table(run.report));
      for (const auto& [key, s] : run.report.sdks) {
        for (const auto& w : s.warnings) {
          std::cerr << "warning: " << key << ": " << w << "\n";
        }
        if (s.error) {
          std::cerr << "error: " << key << ": " << *s.error << "\n";
        }
      }
    } else if (*diff_cmd) {
      auto table = diff_reports(read_report(old_path), read_report(new_path), *onto);
      std::cout << format_diff(table);
    } else if (*tune_cmd) {
      auto scorer = make_scorer(tune_scorer);
      if (!scorer) {
        throw ConfigError("tune needs --scorer, --score-fixtures or " +
                          std::string(kScorerUrlEnv));
      }
      auto corpus = load_labeled_corpus(labeled_path);
      auto hypotheses = generate_hypotheses(*onto, load_policy(0.73));
      std::cout << format_tuning(tune_threshold(corpus.policies, hypotheses, *scorer));
    } else if (*metrics_cmd) {
      auto m = evaluate_claims(load_claim_table(pred_path), load_claim_table(truth_path));
      std::cout << (metrics_format == "json" ? dump_canonical(to_json(m)) : format_metrics(m));
    }
  } catch (const CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCorpus;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
