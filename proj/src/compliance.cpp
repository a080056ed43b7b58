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

#include "sdkpriv/compliance.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "sdkpriv/error.hpp"

namespace sdkpriv {

using nlohmann::json;

std::string_view to_string(FindingKind k) {
  switch (k) {
  case FindingKind::type1_leak:
    return "type1_leak";
  case FindingKind::type2_excessive:
    return "type2_excessive";
  case FindingKind::type3_overclaim:
    return "type3_overclaim";
  case FindingKind::settings_injection:
    return "settings_injection";
  }
  return "type1_leak";
}

std::string_view to_string(Severity s) {
  switch (s) {
  case Severity::info:
    return "info";
  case Severity::warn:
    return "warn";
  case Severity::critical:
    return "critical";
  }
  return "info";
}

std::optional<FindingKind> parse_finding_kind(std::string_view text) {
  for (auto k : {FindingKind::type1_leak, FindingKind::type2_excessive,
                 FindingKind::type3_overclaim, FindingKind::settings_injection}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  return std::nullopt;
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (auto s : {Severity::info, Severity::warn, Severity::critical}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  return std::nullopt;
}

std::vector<Finding> detect_type1(const BehaviorProfile& profile,
                                  const std::vector<TaintTrace>& traces) {
  std::vector<Finding> out;
  for (const auto& d : profile.share_set) {
    Finding f{profile.sdk_id, FindingKind::type1_leak, d, Severity::warn, {}, {}, {}, {}};
    auto ch = profile.share_channels.find(d);
    if (ch != profile.share_channels.end()) {
      for (auto c : ch->second) {
        f.detail += (f.detail.empty() ? "" : ",") + std::string(to_string(c));
        if (c == Channel::system_settings) {
          f.severity = Severity::critical;
        }
      }
    }
    for (const auto& t : traces) {
      if (t.feasibility == Feasibility::feasible && t.data_type == d) {
        f.trace_ids.push_back(t.id);
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Finding> detect_type2(const BehaviorProfile& profile,
                                  const std::optional<ClaimSet>& claims, const Ontology& onto) {
  std::vector<Finding> out;
  std::set<DataTypeId> covered;
  if (claims) {
    for (const auto& c : claims->claimed) {
      auto e = onto.expand_hyponyms(c);
      covered.insert(e.begin(), e.end());
    }
  }
  for (const auto& d : profile.read_set) {
    if (covered.count(d)) {
      continue;
    }
    out.push_back({profile.sdk_id, FindingKind::type2_excessive, d, Severity::warn, {}, {}, {},
                   claims ? "read but not claimed" : "no_policy"});
  }
  return out;
}

std::vector<Finding> detect_type3(const BehaviorProfile& profile, const ClaimSet& claims,
                                  const Ontology& onto) {
  std::vector<Finding> out;
  for (const auto& c : claims.claimed) {
    auto e = onto.expand_hyponyms(c);
    bool read = std::any_of(e.begin(), e.end(),
                            [&](const DataTypeId& t) { return profile.read_set.count(t) != 0; });
    if (!read) {
      out.push_back({profile.sdk_id, FindingKind::type3_overclaim, c, Severity::info, {}, {}, {},
                     "claimed but not read"});
    }
  }
  return out;
}

namespace {

std::optional<std::string> constant_of(const Method& m, const std::string& value) {
  for (const auto& ins : m.body) {
    if (ins.kind == OpKind::constant && ins.dst == value) {
      return ins.literal;
    }
  }
  return std::nullopt;
}

// The settings key written at a sink, when it is a literal.
std::optional<std::string> written_key(const ProgramUnit& unit, const Site& site) {
  const auto& m = unit.methods.at(site.method);
  const auto& ins = m.body.at(site.index);
  if (ins.kind == OpKind::settings_write) {
    return constant_of(m, ins.operands.at(0));
  }
  for (const auto& op : ins.operands) {
    if (auto k = constant_of(m, op)) {
      return k;
    }
  }
  return std::nullopt;
}

bool platform_key(const std::string& key) {
  static const std::regex re("^[a-z0-9_]+$");
  return std::regex_match(key, re);
}

bool identifier_type(const Ontology& onto, const DataTypeId& t) {
  if (t == "android_id") {
    return true;
  }
  if (!onto.contains(t)) {
    return false;
  }
  auto c = onto.at(t).category;
  return c == Category::C1 || c == Category::C2;
}

void add_unique(std::vector<std::string>& list, const std::string& v) {
  if (std::find(list.begin(), list.end(), v) == list.end()) {
    list.push_back(v);
  }
}

} // namespace

std::vector<Finding> detect_settings_injection(const ProgramUnit& unit,
                                               const std::vector<TaintTrace>& traces,
                                               const TaintCatalog& catalog,
                                               const Ontology& onto,
                                               const AnalysisOptions& options) {
  std::map<DataTypeId, Finding> writer;
  auto note = [&](const TaintTrace& t, bool with_id) {
    auto [it, fresh] = writer.try_emplace(t.data_type);
    auto& f = it->second;
    if (fresh) {
      f = {unit.sdk_id, FindingKind::settings_injection, t.data_type, Severity::critical,
           {}, {}, {}, "writer_side"};
    }
    if (with_id) {
      add_unique(f.trace_ids, t.id);
    }
    add_unique(f.sink_sites, t.sink.str());
    if (auto k = written_key(unit, t.sink)) {
      add_unique(f.settings_keys, *k);
    }
  };
  for (const auto& t : traces) {
    if (t.feasibility == Feasibility::feasible && t.channel == Channel::system_settings) {
      note(t, true);
    }
  }
  auto wide = options;
  wide.settings_writes_as_sinks = true;
  for (const auto& t : analyze(unit, catalog, wide).traces) {
    if (t.feasibility == Feasibility::feasible && t.channel == Channel::system_settings &&
        identifier_type(onto, t.data_type)) {
      note(t, false);
    }
  }

  std::set<std::string> written;
  for (const auto& [ref, m] : unit.methods) {
    for (const auto& ins : m.body) {
      if (ins.kind == OpKind::settings_write) {
        if (auto k = constant_of(m, ins.operands.at(0))) {
          written.insert(*k);
        }
      }
    }
  }
  std::map<std::string, Finding> consumer;
  for (const auto& [ref, m] : unit.methods) {
    for (const auto& ins : m.body) {
      if (ins.kind != OpKind::settings_read) {
        continue;
      }
      auto key = constant_of(m, ins.operands.at(0));
      if (!key || platform_key(*key) || written.count(*key)) {
        continue;
      }
      auto [it, fresh] = consumer.try_emplace(*key);
      auto& f = it->second;
      if (fresh) {
        const auto* src = catalog.match_settings_source(*ins.callee, *key);
        f = {unit.sdk_id, FindingKind::settings_injection, src ? src->data_type : "",
             Severity::info, {}, {}, {*key}, "consumer_side"};
      }
      add_unique(f.sink_sites, Site{ref, ins.index}.str());
    }
  }

  std::vector<Finding> out;
  for (auto& [_, f] : writer) {
    std::sort(f.trace_ids.begin(), f.trace_ids.end());
    std::sort(f.sink_sites.begin(), f.sink_sites.end());
    std::sort(f.settings_keys.begin(), f.settings_keys.end());
    out.push_back(std::move(f));
  }
  for (auto& [_, f] : consumer) {
    std::sort(f.sink_sites.begin(), f.sink_sites.end());
    out.push_back(std::move(f));
  }
  return out;
}

SdkReport assess(const ProgramUnit& unit, const std::vector<TaintTrace>& traces,
                 const std::vector<SourceHit>& hits, const std::optional<ClaimSet>& claims,
                 const Ontology& onto, const TaintCatalog& catalog,
                 const AnalysisOptions& options) {
  SdkReport r;
  r.sdk_id = unit.sdk_id;
  r.version = unit.version;
  r.has_policy = claims.has_value();
  r.profile = collection_profile(unit.sdk_id, traces, hits);
  if (claims) {
    r.claimed = claims->claimed;
  }
  for (const auto& t : traces) {
    ++r.trace_counts[t.data_type];
    ++r.feasibility_counts[std::string(to_string(t.feasibility))];
    if (t.feasibility == Feasibility::feasible) {
      ++r.channel_counts[std::string(to_string(t.channel))];
    }
  }
  auto add = [&](std::vector<Finding> fs) {
    r.findings.insert(r.findings.end(), fs.begin(), fs.end());
  };
  add(detect_type1(r.profile, traces));
  add(detect_type2(r.profile, claims, onto));
  if (claims) {
    add(detect_type3(r.profile, *claims, onto));
  }
  add(detect_settings_injection(unit, traces, catalog, onto, options));
  std::sort(r.findings.begin(), r.findings.end());
  return r;
}

ReportAggregates ComplianceReport::aggregates() const {
  ReportAggregates a;
  for (const auto& [_, s] : sdks) {
    ++a.sdks;
    a.sdks_failed += s.error.has_value();
    a.sdks_with_policy += s.has_policy;
    bool excessive = false, overclaim = false;
    for (const auto& f : s.findings) {
      auto kind = std::string(to_string(f.kind));
      ++a.per_kind[kind];
      if (!f.data_type.empty()) {
        ++a.per_type[f.data_type][kind];
      }
      excessive |= f.kind == FindingKind::type2_excessive;
      overclaim |= f.kind == FindingKind::type3_overclaim;
    }
    a.sdks_excessive += s.has_policy && excessive;
    a.sdks_overclaiming += s.has_policy && overclaim;
    for (const auto& [k, n] : s.feasibility_counts) {
      a.feasibility_counts[k] += n;
    }
    for (const auto& [k, n] : s.channel_counts) {
      a.channel_counts[k] += n;
    }
  }
  return a;
}

ComplianceReport merge(const ComplianceReport& a, const ComplianceReport& b) {
  ComplianceReport out = a;
  for (const auto& [key, s] : b.sdks) {
    auto [it, inserted] = out.sdks.emplace(key, s);
    if (!inserted && !(it->second == s)) {
      throw Error("cannot merge reports: conflicting entries for " + key);
    }
  }
  return out;
}

std::string percent1(std::size_t num, std::size_t den) {
  if (den == 0) {
    return "n/a";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * static_cast<double>(num) / den);
  return buf;
}

std::string DiffRow::cell() const {
  auto d = delta();
  if (old_count == 0) {
    return new_count == 0 ? "0" : "+" + std::to_string(new_count) + " (new)";
  }
  unsigned long long mag = d < 0 ? -d : d;
  // Round half up.
  auto pct = (mag * 200 + old_count) / (2 * old_count);
  std::string sign = d > 0 ? "+" : d < 0 ? "-" : "";
  return sign + std::to_string(mag) + " (" + std::to_string(pct) + "%)";
}

DiffTable diff_reports(const ComplianceReport& old_report, const ComplianceReport& new_report,
                       const Ontology& onto) {
  DiffTable table;
  auto ids = [](const ComplianceReport& r) {
    std::set<std::string> s;
    for (const auto& [_, e] : r.sdks) {
      s.insert(e.sdk_id);
    }
    return s;
  };
  auto old_ids = ids(old_report), new_ids = ids(new_report);
  std::set<std::string> common;
  for (const auto& id : old_ids) {
    if (new_ids.count(id)) {
      common.insert(id);
    } else {
      table.warnings.push_back("sdk '" + id + "' only in the old report; ignored");
    }
  }
  for (const auto& id : new_ids) {
    if (!old_ids.count(id)) {
      table.warnings.push_back("sdk '" + id + "' only in the new report; ignored");
    }
  }
  auto counts = [&](const ComplianceReport& r) {
    std::map<DataTypeId, std::size_t> c;
    for (const auto& [_, e] : r.sdks) {
      if (!common.count(e.sdk_id)) {
        continue;
      }
      for (const auto& [t, n] : e.trace_counts) {
        c[t] += n;
      }
    }
    return c;
  };
  auto before = counts(old_report), after = counts(new_report);
  std::set<DataTypeId> types;
  for (const auto& m : {before, after}) {
    for (const auto& [t, _] : m) {
      types.insert(t);
    }
  }
  std::vector<std::pair<std::optional<Category>, DataTypeId>> order;
  for (const auto& t : types) {
    std::optional<Category> c;
    if (onto.contains(t)) {
      c = onto.at(t).category;
    }
    order.emplace_back(c, t);
  }
  std::sort(order.begin(), order.end());
  std::map<Category, DiffRow> sub;
  table.total.label = "total";
  for (const auto& [cat, t] : order) {
    DiffRow row{t, cat, before[t], after[t]};
    if (row.old_count == 0 && row.new_count == 0) {
      continue;
    }
    if (cat) {
      auto& s = sub[*cat];
      s.label = std::string(to_string(*cat));
      s.category = cat;
      s.old_count += row.old_count;
      s.new_count += row.new_count;
    }
    table.total.old_count += row.old_count;
    table.total.new_count += row.new_count;
    table.rows.push_back(row);
  }
  for (auto& [_, s] : sub) {
    table.subtotals.push_back(s);
  }
  return table;
}

std::string format_diff(const DiffTable& table) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %-24s %8s %8s  %s\n", "cat", "data type", "old", "new",
                "change");
  out += line;
  auto emit = [&](const DiffRow& r, const std::string& cat) {
    std::snprintf(line, sizeof line, "%-4s %-24s %8zu %8zu  %s\n", cat.c_str(), r.label.c_str(),
                  r.old_count, r.new_count, r.cell().c_str());
    out += line;
  };
  for (const auto& s : table.subtotals) {
    for (const auto& r : table.rows) {
      if (r.category == s.category) {
        emit(r, s.label);
      }
    }
    DiffRow labeled = s;
    labeled.label = "subtotal";
    emit(labeled, s.label);
  }
  for (const auto& r : table.rows) {
    if (!r.category) {
      emit(r, "-");
    }
  }
  emit(table.total, "");
  for (const auto& w : table.warnings) {
    out += "warning: " + w + "\n";
  }
  return out;
}

json to_json(const Finding& f) {
  return {{"sdk_id", f.sdk_id},
          {"kind", std::string(to_string(f.kind))},
          {"data_type", f.data_type},
          {"severity", std::string(to_string(f.severity))},
          {"trace_ids", f.trace_ids},
          {"sink_sites", f.sink_sites},
          {"settings_keys", f.settings_keys},
          {"detail", f.detail}};
}

Finding finding_from_json(const json& j) {
  auto kind = parse_finding_kind(j.at("kind").get<std::string>());
  auto sev = parse_severity(j.at("severity").get<std::string>());
  if (!kind || !sev) {
    throw Error("finding with unknown kind or severity: " + j.dump());
  }
  return {j.at("sdk_id").get<std::string>(), *kind, j.at("data_type").get<std::string>(), *sev,
          j.at("trace_ids").get<std::vector<std::string>>(),
          j.at("sink_sites").get<std::vector<std::string>>(),
          j.at("settings_keys").get<std::vector<std::string>>(), j.at("detail").get<std::string>()};
}

json to_json(const ReportAggregates& a) {
  return {{"sdks", a.sdks},
          {"sdks_with_policy", a.sdks_with_policy},
          {"sdks_failed", a.sdks_failed},
          {"sdks_excessive", a.sdks_excessive},
          {"sdks_overclaiming", a.sdks_overclaiming},
          {"percent_excessive", percent1(a.sdks_excessive, a.sdks_with_policy)},
          {"percent_overclaiming", percent1(a.sdks_overclaiming, a.sdks_with_policy)},
          {"per_kind", a.per_kind},
          {"per_type", a.per_type},
          {"feasibility_counts", a.feasibility_counts},
          {"channel_counts", a.channel_counts}};
}

json to_json(const ComplianceReport& report) {
  json sdks = json::array();
  for (const auto& [key, s] : report.sdks) {
    json p = {{"read_set", s.profile.read_set}, {"share_set", s.profile.share_set}};
    json channels = json::object();
    for (const auto& [t, cs] : s.profile.share_channels) {
      json arr = json::array();
      for (auto c : cs) {
        arr.push_back(std::string(to_string(c)));
      }
      channels[t] = std::move(arr);
    }
    p["share_channels"] = std::move(channels);
    json findings = json::array();
    for (const auto& f : s.findings) {
      findings.push_back(to_json(f));
    }
    json e = {{"sdk_id", s.sdk_id},
              {"version", s.version},
              {"provider", s.provider},
              {"category", s.category},
              {"has_policy", s.has_policy},
              {"profile", std::move(p)},
              {"claimed", s.claimed},
              {"trace_counts", s.trace_counts},
              {"feasibility_counts", s.feasibility_counts},
              {"channel_counts", s.channel_counts},
              {"findings", std::move(findings)},
              {"warnings", s.warnings}};
    if (s.error) {
      e["error"] = *s.error;
    }
    sdks.push_back(std::move(e));
  }
  return {{"schema_version", 1},
          {"note", kConsentNote},
          {"sdks", std::move(sdks)},
          {"aggregates", to_json(report.aggregates())}};
}

ComplianceReport report_from_json(const json& j) {
  if (j.value("schema_version", 0) != 1) {
    throw Error("unsupported report schema_version");
  }
  ComplianceReport r;
  try {
    for (const auto& e : j.at("sdks")) {
      SdkReport s;
      s.sdk_id = e.at("sdk_id");
      s.version = e.at("version");
      s.provider = e.value("provider", "");
      s.category = e.value("category", "");
      s.has_policy = e.at("has_policy");
      const auto& p = e.at("profile");
      s.profile.sdk_id = s.sdk_id;
      s.profile.read_set = p.at("read_set").get<std::set<DataTypeId>>();
      s.profile.share_set = p.at("share_set").get<std::set<DataTypeId>>();
      for (const auto& [t, arr] : p.at("share_channels").items()) {
        for (const auto& c : arr) {
          auto ch = parse_channel(c.get<std::string>());
          if (!ch) {
            throw Error("unknown channel " + c.dump());
          }
          s.profile.share_channels[t].insert(*ch);
        }
      }
      s.claimed = e.at("claimed").get<std::set<DataTypeId>>();
      s.trace_counts = e.at("trace_counts").get<std::map<DataTypeId, std::size_t>>();
      s.feasibility_counts = e.at("feasibility_counts").get<std::map<std::string, std::size_t>>();
      s.channel_counts = e.at("channel_counts").get<std::map<std::string, std::size_t>>();
      for (const auto& f : e.at("findings")) {
        s.findings.push_back(finding_from_json(f));
      }
      s.warnings = e.at("warnings").get<std::vector<std::string>>();
      if (e.contains("error")) {
        s.error = e.at("error").get<std::string>();
      }
      auto key = s.key();
      if (!r.sdks.emplace(key, std::move(s)).second) {
        throw Error("duplicate report entry " + key);
      }
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  if (j.contains("aggregates") && j.at("aggregates") != to_json(r.aggregates())) {
    throw Error("report aggregates do not match its findings");
  }
  return r;
}

} // namespace sdkpriv
