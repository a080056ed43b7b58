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

#include "sdkpriv/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sdkpriv/bundled.hpp"
#include "sdkpriv/error.hpp"

namespace sdkpriv {

namespace {

constexpr int kSchemaVersion = 1;

std::vector<std::string> string_list(const nlohmann::json& record,
                                     const char* key, const std::string& id) {
  std::vector<std::string> out;
  auto it = record.find(key);
  if (it == record.end()) {
    return out;
  }
  if (!it->is_array()) {
    throw CatalogError("type '" + id + "': '" + key + "' must be a list");
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw CatalogError("type '" + id + "': '" + key +
                         "' entries must be strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

} // namespace

std::string_view to_string(Category c) {
  switch (c) {
  case Category::C1:
    return "C1";
  case Category::C2:
    return "C2";
  case Category::C3:
    return "C3";
  case Category::C4:
    return "C4";
  case Category::C5:
    return "C5";
  }
  return "C1";
}

std::optional<Category> parse_category(std::string_view text) {
  static constexpr Category all[] = {Category::C1, Category::C2, Category::C3,
                                     Category::C4, Category::C5};
  for (Category c : all) {
    if (to_string(c) == text) {
      return c;
    }
  }
  return std::nullopt;
}

std::string normalize_term(std::string_view term) {
  std::string out;
  out.reserve(term.size());
  bool pending_space = false;
  for (unsigned char ch : term) {
    if (std::isalnum(ch) || ch >= 0x80) {
      if (pending_space && !out.empty()) {
        out.push_back(' ');
      }
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(ch)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

Ontology Ontology::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw CatalogError("ontology document must be an object");
  }
  if (doc.contains("schema_version") &&
      doc.at("schema_version") != kSchemaVersion) {
    throw CatalogError("unsupported ontology schema_version " +
                       doc.at("schema_version").dump());
  }
  Ontology onto;
  if (!doc.contains("types")) {
    return onto;
  }
  const auto& records = doc.at("types");
  if (!records.is_array()) {
    throw CatalogError("'types' must be a list");
  }

  for (const auto& rec : records) {
    if (!rec.is_object() || !rec.contains("id") || !rec.at("id").is_string()) {
      throw CatalogError("type record without string 'id': " + rec.dump());
    }
    DataType t;
    t.id = rec.at("id").get<std::string>();
    if (t.id.empty()) {
      throw CatalogError("type record with empty id");
    }
    auto cat = parse_category(rec.value("category", std::string{}));
    if (!cat) {
      throw CatalogError("type '" + t.id + "': category must be one of C1..C5");
    }
    t.category = *cat;
    t.display_name = rec.value("display_name", t.id);
    t.core = rec.value("core", true);
    t.synonyms = string_list(rec, "synonyms", t.id);
    t.extension_synonyms = string_list(rec, "extension_synonyms", t.id);
    t.hypernyms = string_list(rec, "hypernyms", t.id);
    std::sort(t.synonyms.begin(), t.synonyms.end());
    std::sort(t.extension_synonyms.begin(), t.extension_synonyms.end());
    std::sort(t.hypernyms.begin(), t.hypernyms.end());
    auto id = t.id;
    if (!onto.types_.emplace(id, std::move(t)).second) {
      throw CatalogError("duplicate type id '" + id + "'");
    }
  }

  auto add_term = [&](const std::string& term, const DataTypeId& id) {
    auto key = normalize_term(term);
    if (key.empty()) {
      throw CatalogError("type '" + id + "': synonym '" + term +
                         "' is empty after normalization");
    }
    auto [it, inserted] = onto.synonyms_.emplace(key, id);
    if (!inserted && it->second != id) {
      throw CatalogError("synonym '" + term + "' maps to both '" + it->second +
                         "' and '" + id + "'");
    }
  };

  for (const auto& [id, t] : onto.types_) {
    add_term(id, id);
    add_term(t.display_name, id);
    for (const auto& s : t.synonyms) {
      add_term(s, id);
    }
    for (const auto& s : t.extension_synonyms) {
      add_term(s, id);
    }
    for (const auto& h : t.hypernyms) {
      if (!onto.types_.count(h)) {
        throw CatalogError("type '" + id + "': hypernym '" + h +
                           "' is not a known type");
      }
      if (h == id) {
        throw CatalogError("hypernym cycle: '" + id + "' is its own hypernym");
      }
      onto.edges_.emplace(id, h);
      onto.hyponyms_[h].push_back(id);
    }
  }

  // Kahn's algorithm over hyponym -> hypernym edges.
  std::map<DataTypeId, int> indegree;
  for (const auto& [id, _] : onto.types_) {
    indegree[id] = 0;
  }
  for (const auto& [lo, hi] : onto.edges_) {
    ++indegree[hi];
  }
  std::vector<DataTypeId> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) {
      ready.push_back(id);
    }
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& h : onto.types_.at(id).hypernyms) {
      if (--indegree[h] == 0) {
        ready.push_back(h);
      }
    }
  }
  if (visited != onto.types_.size()) {
    for (const auto& [id, d] : indegree) {
      if (d > 0) {
        throw CatalogError("hypernym cycle through '" + id + "'");
      }
    }
  }
  return onto;
}

nlohmann::json Ontology::to_json() const {
  nlohmann::json types = nlohmann::json::array();
  for (const auto& [id, t] : types_) {
    nlohmann::json rec = {{"id", t.id},
                          {"category", std::string(to_string(t.category))},
                          {"display_name", t.display_name},
                          {"synonyms", t.synonyms},
                          {"hypernyms", t.hypernyms}};
    if (!t.core) {
      rec["core"] = false;
    }
    if (!t.extension_synonyms.empty()) {
      rec["extension_synonyms"] = t.extension_synonyms;
    }
    types.push_back(std::move(rec));
  }
  return {{"schema_version", kSchemaVersion}, {"types", std::move(types)}};
}

std::optional<DataTypeId> Ontology::resolve_term(std::string_view term) const {
  auto it = synonyms_.find(normalize_term(term));
  if (it == synonyms_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::set<DataTypeId> Ontology::expand_hyponyms(const DataTypeId& id) const {
  if (!contains(id)) {
    throw CatalogError("unknown data type '" + id + "'");
  }
  std::set<DataTypeId> out{id};
  std::vector<DataTypeId> stack{id};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    auto it = hyponyms_.find(cur);
    if (it == hyponyms_.end()) {
      continue;
    }
    for (const auto& lo : it->second) {
      if (out.insert(lo).second) {
        stack.push_back(lo);
      }
    }
  }
  return out;
}

const DataType& Ontology::at(const DataTypeId& id) const {
  auto it = types_.find(id);
  if (it == types_.end()) {
    throw CatalogError("unknown data type '" + id + "'");
  }
  return it->second;
}

std::vector<DataTypeId> Ontology::core_types() const {
  std::vector<DataTypeId> out;
  for (const auto& [id, t] : types_) {
    if (t.core) {
      out.push_back(id);
    }
  }
  return out;
}

Ontology load_ontology(const nlohmann::json& doc) {
  return Ontology::from_json(doc);
}

Ontology load_ontology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CatalogError("cannot open ontology '" + path + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CatalogError("ontology '" + path + "': " + e.what());
  }
  return Ontology::from_json(doc);
}

const Ontology& default_ontology() {
  static const Ontology onto =
      Ontology::from_json(nlohmann::json::parse(bundled::ontology_json()));
  return onto;
}

} // namespace sdkpriv
