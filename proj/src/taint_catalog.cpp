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

#include <fstream>
#include <set>
#include <tuple>

#include "sdkpriv/bundled.hpp"
#include "sdkpriv/error.hpp"
#include "sdkpriv/taint.hpp"

namespace sdkpriv {

using nlohmann::json;

std::string_view to_string(AccessKind k) {
  switch (k) {
  case AccessKind::api_call:
    return "api_call";
  case AccessKind::field_constant:
    return "field_constant";
  case AccessKind::settings_key:
    return "settings_key";
  }
  return "api_call";
}

std::string_view to_string(Channel c) {
  switch (c) {
  case Channel::network:
    return "network";
  case Channel::file:
    return "file";
  case Channel::system_settings:
    return "system_settings";
  }
  return "network";
}

std::string_view to_string(Feasibility f) {
  switch (f) {
  case Feasibility::feasible:
    return "feasible";
  case Feasibility::infeasible_guard:
    return "infeasible_guard";
  case Feasibility::suppressed:
    return "suppressed";
  }
  return "feasible";
}

std::optional<AccessKind> parse_access_kind(std::string_view text) {
  for (auto k : {AccessKind::api_call, AccessKind::field_constant,
                 AccessKind::settings_key}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  return std::nullopt;
}

std::optional<Channel> parse_channel(std::string_view text) {
  for (auto c : {Channel::network, Channel::file, Channel::system_settings}) {
    if (to_string(c) == text) {
      return c;
    }
  }
  return std::nullopt;
}

std::optional<Feasibility> parse_feasibility(std::string_view text) {
  for (auto f : {Feasibility::feasible, Feasibility::infeasible_guard,
                 Feasibility::suppressed}) {
    if (to_string(f) == text) {
      return f;
    }
  }
  return std::nullopt;
}

MethodPattern MethodPattern::parse(std::string_view text) {
  MethodPattern p;
  p.text_ = std::string(text);
  if (!text.empty() && text.back() == '*') {
    p.kind_ = Kind::prefix;
    p.name_ = std::string(text.substr(0, text.size() - 1));
    if (p.name_.empty()) {
      throw CatalogError("pattern '*' matches everything");
    }
    return p;
  }
  auto ref = MethodRef::parse(text);
  if (!ref) {
    throw CatalogError("malformed method pattern '" + std::string(text) + "'");
  }
  p.name_ = ref->qualified_name();
  p.signature_ = ref->signature;
  p.kind_ = p.signature_.empty() ? Kind::exact_name : Kind::exact_signature;
  return p;
}

bool MethodPattern::matches(const MethodRef& ref) const {
  switch (kind_) {
  case Kind::exact_signature:
    return ref.signature == signature_ && ref.qualified_name() == name_;
  case Kind::exact_name:
    return ref.qualified_name() == name_;
  case Kind::prefix:
    return ref.qualified_name().compare(0, name_.size(), name_) == 0;
  }
  return false;
}

bool MethodPattern::matches_name(std::string_view qualified) const {
  switch (kind_) {
  case Kind::exact_signature:
    return false;
  case Kind::exact_name:
    return qualified == name_;
  case Kind::prefix:
    return qualified.substr(0, name_.size()) == name_;
  }
  return false;
}

std::pair<int, std::size_t> MethodPattern::specificity() const {
  switch (kind_) {
  case Kind::exact_signature:
    return {2, name_.size()};
  case Kind::exact_name:
    return {1, name_.size()};
  case Kind::prefix:
    return {0, name_.size()};
  }
  return {0, 0};
}

namespace {

template <typename Spec, typename Pred>
const Spec* most_specific(const std::vector<Spec>& specs, Pred pred) {
  const Spec* best = nullptr;
  for (const auto& s : specs) {
    if (pred(s) &&
        (!best || s.method.specificity() > best->method.specificity())) {
      best = &s;
    }
  }
  return best;
}

} // namespace

TaintCatalog TaintCatalog::from_json(const json& doc, const Ontology& onto) {
  if (!doc.is_object()) {
    throw CatalogError("catalog document must be an object");
  }
  TaintCatalog cat;
  std::set<std::tuple<std::string, std::string, std::string>> seen_sources;
  for (const auto& rec : doc.value("sources", json::array())) {
    SourceSpec s;
    s.method = MethodPattern::parse(rec.at("method").get<std::string>());
    s.data_type = rec.at("data_type").get<std::string>();
    if (!onto.contains(s.data_type)) {
      throw CatalogError("source '" + s.method.text() +
                         "': unknown data type '" + s.data_type + "'");
    }
    auto kind = parse_access_kind(rec.value("access_kind", "api_call"));
    if (!kind) {
      throw CatalogError("source '" + s.method.text() +
                         "': unknown access_kind");
    }
    s.access_kind = *kind;
    if (rec.contains("key")) {
      s.key = rec.at("key").get<std::string>();
    }
    if ((s.access_kind == AccessKind::settings_key) != s.key.has_value()) {
      throw CatalogError("source '" + s.method.text() +
                         "': 'key' is required for, and only for, settings_key");
    }
    if (rec.contains("guard")) {
      const auto& g = rec.at("guard");
      s.guard = SourceGuard{g.at("predicate").get<std::string>(),
                            g.value("holds", true)};
    }
    auto kind_key = std::string(to_string(s.access_kind));
    if (!seen_sources.emplace(kind_key, s.method.text(), s.key.value_or(""))
             .second) {
      throw CatalogError("duplicate source spec '" + s.method.text() + "'" +
                         (s.key ? " key '" + *s.key + "'" : ""));
    }
    cat.sources_.push_back(std::move(s));
  }
  std::set<std::string> seen_sinks;
  for (const auto& rec : doc.value("sinks", json::array())) {
    SinkSpec s;
    s.method = MethodPattern::parse(rec.at("method").get<std::string>());
    auto ch = parse_channel(rec.value("channel", ""));
    if (!ch) {
      throw CatalogError("sink '" + s.method.text() + "': unknown channel");
    }
    s.channel = *ch;
    if (!seen_sinks.insert(s.method.text()).second) {
      throw CatalogError("duplicate sink spec '" + s.method.text() + "'");
    }
    cat.sinks_.push_back(std::move(s));
  }
  return cat;
}

const SourceSpec* TaintCatalog::match_call_source(const MethodRef& callee) const {
  return most_specific(sources_, [&](const SourceSpec& s) {
    return s.access_kind == AccessKind::api_call && s.method.matches(callee);
  });
}

const SourceSpec* TaintCatalog::match_field_source(std::string_view field) const {
  return most_specific(sources_, [&](const SourceSpec& s) {
    return s.access_kind == AccessKind::field_constant &&
           s.method.matches_name(field);
  });
}

const SourceSpec* TaintCatalog::match_settings_source(const MethodRef& api,
                                                      std::string_view key) const {
  return most_specific(sources_, [&](const SourceSpec& s) {
    return s.access_kind == AccessKind::settings_key && *s.key == key &&
           s.method.matches(api);
  });
}

const SinkSpec* TaintCatalog::match_sink(const MethodRef& callee) const {
  return most_specific(sinks_,
                       [&](const SinkSpec& s) { return s.method.matches(callee); });
}

TaintCatalog load_catalog(const json& doc, const Ontology& onto) {
  try {
    return TaintCatalog::from_json(doc, onto);
  } catch (const json::exception& e) {
    throw CatalogError(std::string("catalog: ") + e.what());
  }
}

TaintCatalog load_catalog_file(const std::string& path, const Ontology& onto) {
  std::ifstream in(path);
  if (!in) {
    throw CatalogError("cannot open catalog '" + path + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CatalogError("catalog '" + path + "': " + e.what());
  }
  return load_catalog(doc, onto);
}

const TaintCatalog& default_catalog() {
  static const TaintCatalog cat =
      load_catalog(json::parse(bundled::catalog_json()), default_ontology());
  return cat;
}

json to_json(const Site& site) {
  return {{"method", site.method.str()}, {"index", site.index}};
}

Site site_from_json(const json& j) {
  auto ref = MethodRef::parse(j.at("method").get<std::string>());
  if (!ref) {
    throw Error("malformed site method " + j.at("method").dump());
  }
  return Site{*ref, j.at("index").get<std::size_t>()};
}

json to_json(const TaintTrace& t) {
  json path = json::array();
  for (const auto& s : t.path) {
    path.push_back(s.str());
  }
  json j = {{"id", t.id},
            {"sdk_id", t.sdk_id},
            {"data_type", t.data_type},
            {"source", to_json(t.source)},
            {"sink", to_json(t.sink)},
            {"source_api", t.source_api},
            {"sink_api", t.sink_api},
            {"channel", std::string(to_string(t.channel))},
            {"path", std::move(path)},
            {"path_count", t.path_count},
            {"feasibility", std::string(to_string(t.feasibility))}};
  if (t.suppression_reason) {
    j["suppression_reason"] = *t.suppression_reason;
  }
  return j;
}

TaintTrace trace_from_json(const json& j) {
  TaintTrace t;
  t.id = j.at("id").get<std::string>();
  t.sdk_id = j.at("sdk_id").get<std::string>();
  t.data_type = j.at("data_type").get<std::string>();
  t.source = site_from_json(j.at("source"));
  t.sink = site_from_json(j.at("sink"));
  t.source_api = j.at("source_api").get<std::string>();
  t.sink_api = j.at("sink_api").get<std::string>();
  auto ch = parse_channel(j.at("channel").get<std::string>());
  auto fe = parse_feasibility(j.at("feasibility").get<std::string>());
  if (!ch || !fe) {
    throw Error("trace " + t.id + ": unknown channel or feasibility");
  }
  t.channel = *ch;
  t.feasibility = *fe;
  for (const auto& s : j.at("path")) {
    auto text = s.get<std::string>();
    auto at = text.rfind('@');
    auto ref = MethodRef::parse(text.substr(0, at));
    if (at == std::string::npos || !ref) {
      throw Error("trace " + t.id + ": malformed path step " + text);
    }
    t.path.push_back(Site{*ref, std::stoul(text.substr(at + 1))});
  }
  t.path_count = j.at("path_count").get<std::size_t>();
  if (j.contains("suppression_reason")) {
    t.suppression_reason = j.at("suppression_reason").get<std::string>();
  }
  return t;
}

} // namespace sdkpriv
