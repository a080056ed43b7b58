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

#include <algorithm>
#include <cctype>
#include <fstream>

#include "sdkpriv/error.hpp"
#include "sdkpriv/taint.hpp"

namespace sdkpriv {

using nlohmann::json;

std::vector<Suppression> load_suppressions(const json& doc) {
  const json* list = &doc;
  if (doc.is_object()) {
    if (doc.contains("schema_version") && doc.at("schema_version") != 1) {
      throw ConfigError("unsupported suppression schema_version " +
                        doc.at("schema_version").dump());
    }
    list = &doc.at("suppressions");
  }
  if (!list->is_array()) {
    throw ConfigError("suppressions must be a list");
  }
  std::vector<Suppression> out;
  try {
    for (const auto& rec : *list) {
      Suppression s{rec.at("sdk_id").get<std::string>(),
                    rec.at("source").get<std::string>(),
                    rec.at("sink").get<std::string>(),
                    rec.value("reason", std::string{})};
      // Validate both patterns up front.
      (void)suppression_matches(s.source, Site{}, "");
      (void)suppression_matches(s.sink, Site{}, "");
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("suppressions: ") + e.what());
  } catch (const CatalogError& e) {
    throw ConfigError(std::string("suppressions: ") + e.what());
  }
  return out;
}

std::vector<Suppression> load_suppressions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open suppressions '" + path + "'");
  }
  try {
    return load_suppressions(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("suppressions '" + path + "': " + e.what());
  }
}

bool suppression_matches(std::string_view pattern, const Site& site,
                         std::string_view api) {
  std::optional<std::size_t> index;
  auto at = pattern.rfind('@');
  if (at != std::string_view::npos) {
    auto digits = pattern.substr(at + 1);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      throw CatalogError("malformed site index in '" + std::string(pattern) + "'");
    }
    index = std::stoul(std::string(digits));
    pattern = pattern.substr(0, at);
  }
  auto p = MethodPattern::parse(pattern);
  if (index && site.index != *index) {
    return false;
  }
  if (p.matches(site.method)) {
    return true;
  }
  auto ref = MethodRef::parse(api);
  return ref && !index && p.matches(*ref);
}

SuppressionResult apply_suppressions(std::vector<TaintTrace> traces,
                                     const std::vector<Suppression>& list) {
  SuppressionResult r;
  std::vector<bool> used(list.size(), false);
  for (auto& t : traces) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto& s = list[k];
      if ((s.sdk_id == "*" || s.sdk_id == t.sdk_id) &&
          suppression_matches(s.source, t.source, t.source_api) &&
          suppression_matches(s.sink, t.sink, t.sink_api)) {
        used[k] = true;
        if (t.feasibility != Feasibility::suppressed) {
          t.feasibility = Feasibility::suppressed;
          t.suppression_reason = s.reason;
        }
      }
    }
  }
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (!used[k]) {
      r.warnings.push_back("suppression for " + list[k].sdk_id + " (" +
                           list[k].source + " -> " + list[k].sink +
                           ") matched no trace");
    }
  }
  r.traces = std::move(traces);
  return r;
}

BehaviorProfile collection_profile(const std::string& sdk_id,
                                   const std::vector<TaintTrace>& traces,
                                   const std::vector<SourceHit>& hits) {
  BehaviorProfile p;
  p.sdk_id = sdk_id;
  for (const auto& h : hits) {
    p.read_set.insert(h.data_type);
  }
  for (const auto& t : traces) {
    if (t.feasibility != Feasibility::feasible) {
      continue;
    }
    p.share_set.insert(t.data_type);
    p.share_channels[t.data_type].insert(t.channel);
    p.read_set.insert(t.data_type);
  }
  return p;
}

} // namespace sdkpriv
