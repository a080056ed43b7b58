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

#include "sdkpriv/scorer.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "sdkpriv/error.hpp"

namespace sdkpriv {

using nlohmann::json;

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

namespace {

double unit_interval(const json& rec, const char* key, const std::string& where) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number()) {
    throw ScorerError(where + ": missing numeric '" + key + "'");
  }
  double v = it->get<double>();
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ScorerError(where + ": '" + key + "' outside [0,1]");
  }
  return v;
}

NliScores scores_from(const json& rec, const std::string& where) {
  return {unit_interval(rec, "entail", where), unit_interval(rec, "contradict", where),
          unit_interval(rec, "neutral", where)};
}

bool is_hash(const std::string& s) {
  static const std::regex re("^[0-9a-f]{64}$");
  return std::regex_match(s, re);
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace

std::vector<ScoreRecord> parse_score_fixtures(std::string_view text) {
  std::vector<ScoreRecord> out;
  std::map<std::pair<std::string, std::string>, NliScores> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    auto where = "score fixtures line " + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ScorerError(where + ": " + e.what());
    }
    ScoreRecord r;
    if (!rec.is_object() || !rec.value("premise_sha256", json()).is_string() ||
        !rec.value("hypothesis_sha256", json()).is_string()) {
      throw ScorerError(where + ": missing hash fields");
    }
    r.premise_sha256 = rec["premise_sha256"];
    r.hypothesis_sha256 = rec["hypothesis_sha256"];
    if (!is_hash(r.premise_sha256) || !is_hash(r.hypothesis_sha256)) {
      throw ScorerError(where + ": hashes must be 64 lowercase hex digits");
    }
    r.scores = scores_from(rec, where);
    auto [it, inserted] = seen.emplace(std::make_pair(r.premise_sha256, r.hypothesis_sha256),
                                       r.scores);
    if (!inserted) {
      if (!(it->second == r.scores)) {
        throw ScorerError(where + ": conflicting scores for a repeated pair");
      }
      continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_score_fixtures(std::vector<ScoreRecord> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.premise_sha256, a.hypothesis_sha256) <
           std::tie(b.premise_sha256, b.hypothesis_sha256);
  });
  std::string out;
  const ScoreRecord* prev = nullptr;
  for (const auto& r : records) {
    if (prev && prev->premise_sha256 == r.premise_sha256 &&
        prev->hypothesis_sha256 == r.hypothesis_sha256) {
      continue;
    }
    prev = &r;
    out += "{\"premise_sha256\":\"" + r.premise_sha256 + "\",\"hypothesis_sha256\":\"" +
           r.hypothesis_sha256 + "\",\"entail\":" + number(r.scores.entail) +
           ",\"contradict\":" + number(r.scores.contradict) +
           ",\"neutral\":" + number(r.scores.neutral) + "}\n";
  }
  return out;
}

FixtureScorer::FixtureScorer(const std::vector<ScoreRecord>& records, bool strict)
    : strict_(strict) {
  for (const auto& r : records) {
    table_[{r.premise_sha256, r.hypothesis_sha256}] = r.scores;
  }
}

FixtureScorer FixtureScorer::from_file(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScorerError("cannot open score fixtures '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return FixtureScorer(parse_score_fixtures(buf.str()), strict);
}

std::vector<NliScores> FixtureScorer::score(const std::string& premise,
                                            const std::vector<std::string>& hypotheses) {
  std::vector<NliScores> out;
  out.reserve(hypotheses.size());
  auto ph = sha256_hex(premise);
  for (const auto& h : hypotheses) {
    auto it = table_.find({ph, sha256_hex(h)});
    if (it != table_.end()) {
      out.push_back(it->second);
    } else if (strict_) {
      throw ScorerError("no recorded score for premise \"" + premise +
                        "\" / hypothesis \"" + h + "\"");
    } else {
      out.push_back(NliScores{});
    }
  }
  return out;
}

std::vector<NliScores> parse_score_response(const json& body, std::size_t expected) {
  if (!body.is_object() || !body.contains("scores") || !body["scores"].is_array()) {
    throw ScorerError("scorer response lacks a 'scores' list");
  }
  const auto& list = body["scores"];
  if (list.size() != expected) {
    throw ScorerError("scorer returned " + std::to_string(list.size()) +
                      " scores for " + std::to_string(expected) + " hypotheses");
  }
  std::vector<NliScores> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (!list[k].is_object()) {
      throw ScorerError("scorer response entry " + std::to_string(k) + " is not an object");
    }
    out.push_back(scores_from(list[k], "scorer response entry " + std::to_string(k)));
  }
  return out;
}

HttpScorer::HttpScorer(const std::string& url, int max_connections, int timeout_seconds)
    : timeout_seconds_(timeout_seconds), slots_(std::max(1, max_connections)) {
  static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw ConfigError("scorer URL must look like http://host:port/path, got '" + url + "'");
  }
  origin_ = m[1];
  path_ = m[2].matched && m[2].length() > 1 ? m[2].str() : "/score";
}

HttpScorer::~HttpScorer() = default;

std::vector<NliScores> HttpScorer::score(const std::string& premise,
                                         const std::vector<std::string>& hypotheses) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};

  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  json req = {{"premise", premise}, {"hypotheses", hypotheses}};
  auto res = client.Post(path_, req.dump(), "application/json");
  if (!res) {
    throw ScorerError("scorer at " + origin_ + path_ +
                      " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ScorerError("scorer at " + origin_ + path_ + " answered HTTP " +
                      std::to_string(res->status));
  }
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ScorerError(std::string("scorer response is not JSON: ") + e.what());
  }
  return parse_score_response(body, hypotheses.size());
}

} // namespace sdkpriv
