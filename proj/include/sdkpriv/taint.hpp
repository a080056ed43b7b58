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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sdkpriv/ontology.hpp"
#include "sdkpriv/program.hpp"

namespace sdkpriv {

enum class AccessKind { api_call, field_constant, settings_key };
enum class Channel { network, file, system_settings };
enum class Feasibility { feasible, infeasible_guard, suppressed };

std::string_view to_string(AccessKind k);
std::string_view to_string(Channel c);
std::string_view to_string(Feasibility f);
std::optional<AccessKind> parse_access_kind(std::string_view text);
std::optional<Channel> parse_channel(std::string_view text);
std::optional<Feasibility> parse_feasibility(std::string_view text);

// Matches methods (or fields) by one of:
//   pkg.Class.member            any overload
//   pkg.Class.member(desc)ret   exact descriptor
//   prefix*                     qualified name starts with prefix
class MethodPattern {
public:
  static MethodPattern parse(std::string_view text);

  bool matches(const MethodRef& ref) const;
  bool matches_name(std::string_view qualified) const;
  // Orders competing matches: exact descriptor, then exact name, then the
  // longest prefix.
  std::pair<int, std::size_t> specificity() const;
  const std::string& text() const { return text_; }

  bool operator==(const MethodPattern& o) const { return text_ == o.text_; }

private:
  enum class Kind { exact_signature, exact_name, prefix };
  Kind kind_ = Kind::exact_name;
  std::string text_;
  std::string name_;
  std::string signature_;
};

// A source that only yields data while `predicate(receiver) == holds`.
struct SourceGuard {
  std::string predicate;
  bool holds = true;
};

struct SourceSpec {
  MethodPattern method;
  DataTypeId data_type;
  AccessKind access_kind = AccessKind::api_call;
  // settings_key sources: the settings entry name.
  std::optional<std::string> key;
  std::optional<SourceGuard> guard;
};

struct SinkSpec {
  MethodPattern method;
  Channel channel = Channel::network;
};

class TaintCatalog {
public:
  /// Throws CatalogError on unknown data types, unknown enums and duplicate
  /// specs.
  static TaintCatalog from_json(const nlohmann::json& doc, const Ontology& onto);

  const std::vector<SourceSpec>& sources() const { return sources_; }
  const std::vector<SinkSpec>& sinks() const { return sinks_; }

  const SourceSpec* match_call_source(const MethodRef& callee) const;
  const SourceSpec* match_field_source(std::string_view field) const;
  const SourceSpec* match_settings_source(const MethodRef& api,
                                          std::string_view key) const;
  const SinkSpec* match_sink(const MethodRef& callee) const;

private:
  std::vector<SourceSpec> sources_;
  std::vector<SinkSpec> sinks_;
};

TaintCatalog load_catalog(const nlohmann::json& doc, const Ontology& onto);
TaintCatalog load_catalog_file(const std::string& path, const Ontology& onto);
const TaintCatalog& default_catalog();

struct AnalysisOptions {
  std::size_t call_depth_bound = 20;
  // Per-method cap on explored guard states and on counted paths.
  std::size_t path_bound = 10'000;
  // Treat every settings_write as a system_settings sink, catalogued or not.
  bool settings_writes_as_sinks = false;
};

struct SourceHit {
  Site site;
  DataTypeId data_type;
  AccessKind access_kind = AccessKind::api_call;
  std::string api;

  auto operator<=>(const SourceHit&) const = default;
  bool operator==(const SourceHit&) const = default;
};

struct TaintTrace {
  std::string id;
  std::string sdk_id;
  DataTypeId data_type;
  Site source;
  Site sink;
  std::string source_api;
  std::string sink_api;
  Channel channel = Channel::network;
  // Shortest path from source to sink; feasible paths take precedence.
  std::vector<Site> path;
  // Number of distinct paths of that shortest length, capped at path_bound.
  std::size_t path_count = 1;
  Feasibility feasibility = Feasibility::feasible;
  std::optional<std::string> suppression_reason;

  bool operator==(const TaintTrace&) const = default;
};

struct Diagnostic {
  std::string method;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

struct AnalysisResult {
  std::vector<TaintTrace> traces;
  std::vector<SourceHit> source_hits;
  std::vector<Diagnostic> diagnostics;
};

/// Forward, context-insensitive taint propagation over a loaded unit.
/// Traces are ordered by source site, then sink site, then path length.
AnalysisResult analyze(const ProgramUnit& unit, const TaintCatalog& catalog,
                       const AnalysisOptions& options = {});

struct Suppression {
  std::string sdk_id;
  std::string source;
  std::string sink;
  std::string reason;
};

std::vector<Suppression> load_suppressions(const nlohmann::json& doc);
std::vector<Suppression> load_suppressions_file(const std::string& path);

// A suppression pattern is a MethodPattern with an optional `@index` suffix,
// matched against the site's method or the API called there.
bool suppression_matches(std::string_view pattern, const Site& site,
                         std::string_view api);

struct SuppressionResult {
  std::vector<TaintTrace> traces;
  std::vector<std::string> warnings;
};

SuppressionResult apply_suppressions(std::vector<TaintTrace> traces,
                                     const std::vector<Suppression>& list);

struct BehaviorProfile {
  std::string sdk_id;
  std::set<DataTypeId> read_set;
  std::set<DataTypeId> share_set;
  std::map<DataTypeId, std::set<Channel>> share_channels;

  bool operator==(const BehaviorProfile&) const = default;
};

/// read_set from every source hit; share_set from feasible traces only.
BehaviorProfile collection_profile(const std::string& sdk_id,
                                   const std::vector<TaintTrace>& traces,
                                   const std::vector<SourceHit>& hits);

nlohmann::json to_json(const Site& site);
Site site_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaintTrace& trace);
TaintTrace trace_from_json(const nlohmann::json& j);

} // namespace sdkpriv
