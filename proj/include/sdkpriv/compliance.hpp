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
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "sdkpriv/ontology.hpp"
#include "sdkpriv/policy.hpp"
#include "sdkpriv/program.hpp"
#include "sdkpriv/taint.hpp"

namespace sdkpriv {

enum class FindingKind { type1_leak, type2_excessive, type3_overclaim, settings_injection };
enum class Severity { info, warn, critical };

std::string_view to_string(FindingKind k);
std::string_view to_string(Severity s);
std::optional<FindingKind> parse_finding_kind(std::string_view text);
std::optional<Severity> parse_severity(std::string_view text);

struct Finding {
  std::string sdk_id;
  FindingKind kind = FindingKind::type1_leak;
  // Empty only for consumer-side settings findings on keys with no known type.
  DataTypeId data_type;
  Severity severity = Severity::warn;
  std::vector<std::string> trace_ids;
  std::vector<std::string> sink_sites;
  std::vector<std::string> settings_keys;
  // Claim-vs-behavior delta for type2/type3; origin marker for others
  // ("no_policy", "consumer_side", ...).
  std::string detail;

  auto key() const { return std::tie(sdk_id, kind, data_type, detail, settings_keys); }
  bool operator<(const Finding& o) const { return key() < o.key(); }
  bool operator==(const Finding&) const = default;
};

/// One finding per shared type; critical when any of its channels is
/// system_settings.
std::vector<Finding> detect_type1(const BehaviorProfile& profile,
                                  const std::vector<TaintTrace>& traces);

/// Read types not covered by the expanded claims. Without a policy every read
/// type is reported with detail "no_policy".
std::vector<Finding> detect_type2(const BehaviorProfile& profile,
                                  const std::optional<ClaimSet>& claims, const Ontology& onto);

/// Claimed types none of whose hyponyms (or itself) is read.
std::vector<Finding> detect_type3(const BehaviorProfile& profile, const ClaimSet& claims,
                                  const Ontology& onto);

/// Writer side: feasible traces into system settings, plus any settings write
/// fed by an identifier source (C1, C2, android_id) found by re-analysing
/// with every write treated as a sink. Consumer side: constant non-platform
/// keys that the unit reads but never writes.
std::vector<Finding> detect_settings_injection(const ProgramUnit& unit,
                                               const std::vector<TaintTrace>& traces,
                                               const TaintCatalog& catalog,
                                               const Ontology& onto,
                                               const AnalysisOptions& options = {});

struct SdkReport {
  std::string sdk_id;
  std::string version;
  std::string provider;
  std::string category;
  bool has_policy = false;
  BehaviorProfile profile;
  std::set<DataTypeId> claimed;
  // All traces (any feasibility) per data type.
  std::map<DataTypeId, std::size_t> trace_counts;
  std::map<std::string, std::size_t> feasibility_counts;
  // Feasible traces per channel.
  std::map<std::string, std::size_t> channel_counts;
  std::vector<Finding> findings;
  std::vector<std::string> warnings;
  std::optional<std::string> error;

  std::string key() const { return sdk_id + "@" + version; }
  bool operator==(const SdkReport&) const = default;
};

/// Runs all detectors for one unit.
SdkReport assess(const ProgramUnit& unit, const std::vector<TaintTrace>& traces,
                 const std::vector<SourceHit>& hits, const std::optional<ClaimSet>& claims,
                 const Ontology& onto, const TaintCatalog& catalog,
                 const AnalysisOptions& options = {});

struct ReportAggregates {
  std::size_t sdks = 0;
  std::size_t sdks_with_policy = 0;
  std::size_t sdks_failed = 0;
  std::size_t sdks_excessive = 0;   // among policy holders
  std::size_t sdks_overclaiming = 0; // among policy holders
  std::map<std::string, std::size_t> per_kind;
  std::map<DataTypeId, std::map<std::string, std::size_t>> per_type;
  std::map<std::string, std::size_t> feasibility_counts;
  std::map<std::string, std::size_t> channel_counts;

  bool operator==(const ReportAggregates&) const = default;
};

struct ComplianceReport {
  std::map<std::string, SdkReport> sdks;

  ReportAggregates aggregates() const;
  bool operator==(const ComplianceReport&) const = default;
};

inline constexpr const char* kConsentNote =
    "consent state is not modeled; every shared datum counts as a potential leak";

/// Union of disjoint reports. Throws Error when both contain the same
/// sdk@version with different contents.
ComplianceReport merge(const ComplianceReport& a, const ComplianceReport& b);

/// "36.7%"; "n/a" when the denominator is zero.
std::string percent1(std::size_t num, std::size_t den);

struct DiffRow {
  std::string label; // data type, category subtotal or "total"
  std::optional<Category> category;
  std::size_t old_count = 0;
  std::size_t new_count = 0;

  long long delta() const {
    return static_cast<long long>(new_count) - static_cast<long long>(old_count);
  }
  /// "-94 (72%)", "+53 (new)", "0 (0%)".
  std::string cell() const;
  bool operator==(const DiffRow&) const = default;
};

struct DiffTable {
  std::vector<DiffRow> rows;      // per data type, category then id order
  std::vector<DiffRow> subtotals; // per category
  DiffRow total;
  std::vector<std::string> warnings;
};

/// Compares per-type trace counts over the SDK ids present in both reports.
DiffTable diff_reports(const ComplianceReport& old_report, const ComplianceReport& new_report,
                       const Ontology& onto);
std::string format_diff(const DiffTable& table);

nlohmann::json to_json(const Finding& f);
Finding finding_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComplianceReport& report);
ComplianceReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReportAggregates& a);

} // namespace sdkpriv
