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

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "sdkpriv/ontology.hpp"
#include "sdkpriv/scorer.hpp"

namespace sdkpriv {

enum class Stance { positive, negative, irrelevant };
std::string_view to_string(Stance s);

struct Hypothesis {
  DataTypeId data_type;
  std::string verb;
  std::string surface_term;
  Stance stance = Stance::positive;
  std::string text;

  bool operator==(const Hypothesis&) const = default;
};

struct LexiconEntry {
  DataTypeId data_type;
  std::vector<std::string> verbs;
  std::vector<std::string> terms;
};

struct PolicyConfig {
  double threshold = 0.73;
  std::vector<LexiconEntry> lexicon;
};

/// Throws ConfigError on unknown data types or a threshold outside (0, 1].
PolicyConfig load_policy_config(const nlohmann::json& lexicon_doc,
                                const Ontology& onto, double threshold = 0.73);
const PolicyConfig& default_policy_config();

/// Sentences in first-occurrence order, whitespace-collapsed, duplicates
/// dropped.
std::vector<std::string> segment(std::string_view text);

/// Three stanced hypotheses per (type, verb, term); types in id order, verbs
/// and terms in lexicon order.
std::vector<Hypothesis> generate_hypotheses(const Ontology& onto,
                                            const PolicyConfig& config);

std::string render_hypothesis(Stance stance, std::string_view verb,
                              std::string_view term);

struct EntailmentScores {
  double score_p = 0.0;
  double score_n = 0.0;
  double score_i = 0.0;

  bool operator==(const EntailmentScores&) const = default;
};

inline bool decide(const EntailmentScores& s, double threshold) {
  return s.score_p > threshold && s.score_p > s.score_n && s.score_p > s.score_i;
}

struct ClaimEvidence {
  std::string premise;
  std::string verb;
  std::string surface_term;
  EntailmentScores scores;

  auto operator<=>(const ClaimEvidence& o) const {
    return std::tie(premise, verb, surface_term) <=>
           std::tie(o.premise, o.verb, o.surface_term);
  }
  bool operator==(const ClaimEvidence&) const = default;
};

struct ClaimSet {
  std::string sdk_id;
  std::set<DataTypeId> claimed;
  std::map<DataTypeId, std::vector<ClaimEvidence>> evidence;

  bool operator==(const ClaimSet&) const = default;
};

/// Per-triple scores for every premise; the scorer is called once per
/// distinct premise. A premise whose scoring fails is skipped and reported
/// in `warnings`.
struct ScoredPremise {
  std::string premise;
  // Aligned with hypotheses / 3.
  std::vector<EntailmentScores> triples;
};

std::vector<ScoredPremise> score_premises(const std::vector<std::string>& premises,
                                          const std::vector<Hypothesis>& hypotheses,
                                          Scorer& scorer,
                                          std::vector<std::string>* warnings = nullptr);

ClaimSet claims_at(const std::string& sdk_id, const std::vector<ScoredPremise>& scored,
                   const std::vector<Hypothesis>& hypotheses, double threshold);

ClaimSet extract_claims(const std::string& sdk_id,
                        const std::vector<std::string>& premises,
                        const std::vector<Hypothesis>& hypotheses, Scorer& scorer,
                        const PolicyConfig& config,
                        std::vector<std::string>* warnings = nullptr);

struct LabeledPolicy {
  std::string sdk_id;
  std::string text;
  std::set<DataTypeId> truth;
};

struct TuningPoint {
  double threshold = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1 = 0.0;
};

struct TuningResult {
  double threshold = 0.0;
  std::vector<TuningPoint> sweep;
};

/// Sweeps T over 0.50, 0.51, ..., 0.99 and picks the fewest false positives,
/// then the highest F1, then the smallest T. Throws ConfigError on an empty
/// corpus.
TuningResult tune_threshold(const std::vector<LabeledPolicy>& corpus,
                            const std::vector<Hypothesis>& hypotheses, Scorer& scorer);

nlohmann::json to_json(const ClaimSet& claims);
ClaimSet claims_from_json(const nlohmann::json& j);

} // namespace sdkpriv
