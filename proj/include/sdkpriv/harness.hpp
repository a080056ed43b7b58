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

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdkpriv/compliance.hpp"
#include "sdkpriv/policy.hpp"
#include "sdkpriv/scorer.hpp"
#include "sdkpriv/taint.hpp"

namespace sdkpriv {

struct CorpusEntry {
  std::string sdk_id;
  std::string version;
  std::filesystem::path program;
  std::optional<std::filesystem::path> policy;
  std::string provider;
  std::string category;

  std::string key() const { return sdk_id + "@" + version; }
};

struct Manifest {
  std::vector<CorpusEntry> entries;
};

/// Paths resolve against the manifest's directory. Throws CorpusError when the
/// file cannot be read or parsed, or lists an sdk@version twice.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base);

struct RunConfig {
  const Ontology* ontology = nullptr;
  const TaintCatalog* catalog = nullptr;
  PolicyConfig policy;
  AnalysisOptions analysis;
  std::vector<Suppression> suppressions;
  // Required as soon as any entry has a policy.
  Scorer* scorer = nullptr;
  std::size_t jobs = 1;
};

struct CorpusRun {
  ComplianceReport report;
  std::map<std::string, std::vector<TaintTrace>> traces;
  std::map<std::string, ClaimSet> claims;
};

/// Runs analysis, claim extraction and assessment per entry. Unreadable
/// entries become error records; missing scorer or catalog is a ConfigError.
/// The result does not depend on `jobs`.
CorpusRun run_corpus(const Manifest& manifest, const RunConfig& config);

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0;

  bool operator==(const Confusion&) const = default;
};

// 0/0 precision and recall are 1; F1 is 0 when either is 0.
double precision(const Confusion& c);
double recall(const Confusion& c);
double f1(const Confusion& c);

struct MetricsSummary {
  std::map<DataTypeId, Confusion> per_type;
  Confusion total;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 0.0;
};

using ClaimTable = std::map<std::string, std::set<DataTypeId>>;

/// Throws ConfigError naming ids present on only one side.
MetricsSummary evaluate_claims(const ClaimTable& predicted, const ClaimTable& truth);

/// Accepts {"key": [types]} or a claims.json document.
ClaimTable load_claim_table(const std::filesystem::path& path);

nlohmann::json to_json(const MetricsSummary& m);
std::string format_metrics(const MetricsSummary& m);

struct LabeledCorpus {
  std::vector<LabeledPolicy> policies;
};

/// {"schema_version":1,"policies":[{"sdk_id","policy","truth":[...]}]}; policy
/// paths resolve against the file's directory.
LabeledCorpus load_labeled_corpus(const std::filesystem::path& path);

std::string format_report_table(const ComplianceReport& report);
std::string format_tuning(const TuningResult& r);

/// Writes report.json, report.txt, traces.json and claims.json under `dir`.
/// Throws Error when the directory cannot be written.
void emit_report(const CorpusRun& run, const std::filesystem::path& dir);

std::string dump_canonical(const nlohmann::json& j);
nlohmann::json traces_document(const CorpusRun& run);
nlohmann::json claims_document(const CorpusRun& run);

} // namespace sdkpriv
