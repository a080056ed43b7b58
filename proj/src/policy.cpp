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

#include "sdkpriv/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sdkpriv/bundled.hpp"
#include "sdkpriv/error.hpp"

namespace sdkpriv {

using nlohmann::json;

std::string_view to_string(Stance s) {
  switch (s) {
  case Stance::positive:
    return "positive";
  case Stance::negative:
    return "negative";
  case Stance::irrelevant:
    return "irrelevant";
  }
  return "positive";
}

PolicyConfig load_policy_config(const json& doc, const Ontology& onto, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold must lie in (0, 1]");
  }
  PolicyConfig cfg;
  cfg.threshold = threshold;
  try {
    if (doc.contains("schema_version") && doc.at("schema_version") != 1) {
      throw ConfigError("unsupported lexicon schema_version " +
                        doc.at("schema_version").dump());
    }
    std::set<DataTypeId> seen;
    for (const auto& rec : doc.value("entries", json::array())) {
      LexiconEntry e{rec.at("type").get<std::string>(),
                     rec.at("verbs").get<std::vector<std::string>>(),
                     rec.at("terms").get<std::vector<std::string>>()};
      if (!onto.contains(e.data_type)) {
        throw ConfigError("lexicon entry for unknown data type '" + e.data_type + "'");
      }
      if (!seen.insert(e.data_type).second) {
        throw ConfigError("duplicate lexicon entry for '" + e.data_type + "'");
      }
      cfg.lexicon.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("lexicon: ") + e.what());
  }
  std::sort(cfg.lexicon.begin(), cfg.lexicon.end(),
            [](const auto& a, const auto& b) { return a.data_type < b.data_type; });
  return cfg;
}

const PolicyConfig& default_policy_config() {
  static const PolicyConfig cfg =
      load_policy_config(json::parse(bundled::lexicon_json()), default_ontology());
  return cfg;
}

namespace {

// Lowercased words that end in a period without ending the sentence.
const std::set<std::string>& abbreviations() {
  static const std::set<std::string> list = {
      "e.g", "i.e", "etc", "inc", "ltd", "co", "corp", "mr", "mrs", "ms", "dr",
      "vs", "no", "st", "u.s", "approx", "cf", "fig", "al"};
  return list;
}

std::string collapse(std::string_view s) {
  std::string out;
  bool space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      space = !out.empty();
    } else {
      if (space) {
        out.push_back(' ');
      }
      space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

} // namespace

std::vector<std::string> segment(std::string_view text) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  auto cut = [&](std::size_t end) {
    auto s = collapse(text.substr(start, end - start));
    if (!s.empty()) {
      pieces.push_back(std::move(s));
    }
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      // A blank line ends a paragraph (headings rarely carry punctuation).
      auto j = i + 1;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) {
        ++j;
      }
      if (j < text.size() && text[j] == '\n') {
        cut(i);
      }
      continue;
    }
    if (c != '.' && c != '!' && c != '?') {
      continue;
    }
    // Absorb runs of terminal punctuation and closing quotes/brackets.
    auto end = i + 1;
    while (end < text.size() &&
           std::string_view(".!?\"')]").find(text[end]) != std::string_view::npos) {
      ++end;
    }
    if (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) {
      i = end - 1;
      continue; // 3.5, example.com, e.g.x
    }
    if (c == '.') {
      auto w = i;
      while (w > start && !std::isspace(static_cast<unsigned char>(text[w - 1]))) {
        --w;
      }
      std::string word;
      for (auto k = w; k < i; ++k) {
        if (text[k] != '(' && text[k] != '"') {
          word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[k]))));
        }
      }
      if (abbreviations().count(word)) {
        i = end - 1;
        continue;
      }
    }
    cut(end);
    i = end - 1;
  }
  cut(text.size());

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& p : pieces) {
    if (seen.insert(p).second) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string render_hypothesis(Stance stance, std::string_view verb, std::string_view term) {
  std::string tail = std::string(verb) + " " + std::string(term) + ".";
  switch (stance) {
  case Stance::positive:
    return "It will " + tail;
  case Stance::negative:
    return "It does not " + tail;
  case Stance::irrelevant:
    return "It does not mention whether to " + tail;
  }
  return tail;
}

std::vector<Hypothesis> generate_hypotheses(const Ontology& onto, const PolicyConfig& config) {
  auto entries = config.lexicon;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.data_type < b.data_type; });
  std::vector<Hypothesis> out;
  for (const auto& e : entries) {
    if (!onto.contains(e.data_type)) {
      throw ConfigError("lexicon entry for unknown data type '" + e.data_type + "'");
    }
    for (const auto& verb : e.verbs) {
      for (const auto& term : e.terms) {
        for (auto s : {Stance::positive, Stance::negative, Stance::irrelevant}) {
          out.push_back({e.data_type, verb, term, s, render_hypothesis(s, verb, term)});
        }
      }
    }
  }
  return out;
}

std::vector<ScoredPremise> score_premises(const std::vector<std::string>& premises,
                                          const std::vector<Hypothesis>& hypotheses,
                                          Scorer& scorer, std::vector<std::string>* warnings) {
  if (hypotheses.size() % 3 != 0) {
    throw ConfigError("hypotheses must come in stance triples");
  }
  std::set<std::string> unique(premises.begin(), premises.end());
  std::vector<std::string> texts;
  texts.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    texts.push_back(h.text);
  }
  std::vector<ScoredPremise> out;
  for (const auto& premise : unique) {
    std::vector<NliScores> scores;
    try {
      scores = scorer.score(premise, texts);
      if (scores.size() != texts.size()) {
        throw ScorerError("scorer returned a misaligned result");
      }
    } catch (const ScorerError& e) {
      if (warnings) {
        warnings->push_back("premise skipped: \"" + premise + "\": " + e.what());
      }
      continue;
    }
    ScoredPremise sp{premise, {}};
    for (std::size_t k = 0; k < texts.size(); k += 3) {
      sp.triples.push_back({scores[k].entail, scores[k + 1].entail, scores[k + 2].entail});
    }
    out.push_back(std::move(sp));
  }
  return out;
}

ClaimSet claims_at(const std::string& sdk_id, const std::vector<ScoredPremise>& scored,
                   const std::vector<Hypothesis>& hypotheses, double threshold) {
  ClaimSet cs;
  cs.sdk_id = sdk_id;
  for (const auto& sp : scored) {
    for (std::size_t t = 0; t < sp.triples.size(); ++t) {
      if (!decide(sp.triples[t], threshold)) {
        continue;
      }
      const auto& h = hypotheses[3 * t];
      cs.claimed.insert(h.data_type);
      cs.evidence[h.data_type].push_back({sp.premise, h.verb, h.surface_term, sp.triples[t]});
    }
  }
  for (auto& [_, list] : cs.evidence) {
    std::sort(list.begin(), list.end());
  }
  return cs;
}

ClaimSet extract_claims(const std::string& sdk_id, const std::vector<std::string>& premises,
                        const std::vector<Hypothesis>& hypotheses, Scorer& scorer,
                        const PolicyConfig& config, std::vector<std::string>* warnings) {
  return claims_at(sdk_id, score_premises(premises, hypotheses, scorer, warnings), hypotheses,
                   config.threshold);
}

TuningResult tune_threshold(const std::vector<LabeledPolicy>& corpus,
                            const std::vector<Hypothesis>& hypotheses, Scorer& scorer) {
  if (corpus.empty()) {
    throw ConfigError("threshold tuning needs at least one labeled policy");
  }
  std::vector<std::vector<ScoredPremise>> scored;
  for (const auto& p : corpus) {
    scored.push_back(score_premises(segment(p.text), hypotheses, scorer));
  }
  TuningResult result;
  const TuningPoint* best = nullptr;
  for (int h = 50; h <= 99; ++h) {
    TuningPoint pt;
    pt.threshold = h / 100.0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      auto claimed = claims_at(corpus[k].sdk_id, scored[k], hypotheses, pt.threshold).claimed;
      for (const auto& t : claimed) {
        (corpus[k].truth.count(t) ? pt.tp : pt.fp) += 1;
      }
      for (const auto& t : corpus[k].truth) {
        pt.fn += claimed.count(t) ? 0 : 1;
      }
    }
    double denom = 2.0 * pt.tp + pt.fp + pt.fn;
    pt.f1 = pt.tp == 0 ? 0.0 : 2.0 * pt.tp / denom;
    result.sweep.push_back(pt);
  }
  for (const auto& pt : result.sweep) {
    if (!best || pt.fp < best->fp || (pt.fp == best->fp && pt.f1 > best->f1 + 1e-12)) {
      best = &pt;
    }
  }
  result.threshold = best->threshold;
  return result;
}

json to_json(const ClaimSet& cs) {
  json evidence = json::object();
  for (const auto& [type, list] : cs.evidence) {
    json arr = json::array();
    for (const auto& e : list) {
      arr.push_back({{"premise", e.premise},
                     {"verb", e.verb},
                     {"term", e.surface_term},
                     {"score_p", e.scores.score_p},
                     {"score_n", e.scores.score_n},
                     {"score_i", e.scores.score_i}});
    }
    evidence[type] = std::move(arr);
  }
  return {{"sdk_id", cs.sdk_id}, {"claimed", cs.claimed}, {"evidence", std::move(evidence)}};
}

ClaimSet claims_from_json(const json& j) {
  ClaimSet cs;
  cs.sdk_id = j.at("sdk_id").get<std::string>();
  cs.claimed = j.at("claimed").get<std::set<DataTypeId>>();
  const auto evidence = j.value("evidence", json::object());
  for (const auto& [type, arr] : evidence.items()) {
    auto& list = cs.evidence[type];
    for (const auto& e : arr) {
      list.push_back({e.at("premise").get<std::string>(), e.at("verb").get<std::string>(),
                      e.at("term").get<std::string>(),
                      {e.at("score_p").get<double>(), e.at("score_n").get<double>(),
                       e.at("score_i").get<double>()}});
    }
  }
  return cs;
}

} // namespace sdkpriv
