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
#include <memory>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace sdkpriv {

// One NLI judgement of a hypothesis against a premise.
struct NliScores {
  double entail = 0.0;
  double contradict = 0.0;
  double neutral = 1.0;

  bool operator==(const NliScores&) const = default;
};

class Scorer {
public:
  virtual ~Scorer() = default;
  /// Returns one result per hypothesis, position-aligned. Throws ScorerError.
  virtual std::vector<NliScores> score(const std::string& premise,
                                       const std::vector<std::string>& hypotheses) = 0;
};

std::string sha256_hex(std::string_view text);

struct ScoreRecord {
  std::string premise_sha256;
  std::string hypothesis_sha256;
  NliScores scores;
};

/// Reads the line-delimited score fixture format. Blank and `#` lines are
/// skipped; a repeated key with different scores is an error.
std::vector<ScoreRecord> parse_score_fixtures(std::string_view text);
/// Canonical form: sorted by (premise hash, hypothesis hash), one record per
/// key, fixed number formatting.
std::string format_score_fixtures(std::vector<ScoreRecord> records);

// Replays recorded scores keyed by content hash. Pairs absent from the file
// score as neutral (0, 0, 1) unless `strict`.
class FixtureScorer : public Scorer {
public:
  explicit FixtureScorer(const std::vector<ScoreRecord>& records, bool strict = false);
  static FixtureScorer from_file(const std::string& path, bool strict = false);

  std::vector<NliScores> score(const std::string& premise,
                               const std::vector<std::string>& hypotheses) override;
  std::size_t size() const { return table_.size(); }

private:
  std::map<std::pair<std::string, std::string>, NliScores> table_;
  bool strict_;
};

// Client for the scorer service: POST {premise, hypotheses} to `url`,
// expecting {scores: [{entail, contradict, neutral}]}.
class HttpScorer : public Scorer {
public:
  /// `url` is http://host[:port][/path]; the path defaults to /score.
  explicit HttpScorer(const std::string& url, int max_connections = 4,
                      int timeout_seconds = 60);
  ~HttpScorer() override;

  std::vector<NliScores> score(const std::string& premise,
                               const std::vector<std::string>& hypotheses) override;

private:
  std::string origin_;
  std::string path_;
  int timeout_seconds_;
  std::counting_semaphore<> slots_;
};

/// Validates a wire response against the request size.
std::vector<NliScores> parse_score_response(const nlohmann::json& body,
                                            std::size_t expected);

inline constexpr const char* kScorerUrlEnv = "SDKPRIV_SCORER_URL";

} // namespace sdkpriv
