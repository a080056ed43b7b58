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
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace sdkpriv {

using DataTypeId = std::string;

enum class Category { C1, C2, C3, C4, C5 };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

struct DataType {
  DataTypeId id;
  Category category = Category::C1;
  std::string display_name;
  // Core types make up the privacy data universe. Auxiliary entries are
  // policy-language umbrella terms (device_identifiers) or components of a
  // core type (name, email) that only participate in hypernymy.
  bool core = true;
  std::vector<std::string> synonyms;
  // Synonyms added beyond the documented examples; loaded identically.
  std::vector<std::string> extension_synonyms;
  std::vector<DataTypeId> hypernyms;

  bool operator==(const DataType&) const = default;
};

// Case, punctuation and surrounding whitespace are folded; inner runs of
// whitespace collapse to one space. No stemming.
std::string normalize_term(std::string_view term);

/// Privacy data universe with synonymy and hypernymy. Immutable once loaded.
class Ontology {
public:
  Ontology() = default;

  /// Validates duplicate ids, dangling references and hypernym cycles.
  /// Throws CatalogError naming the offending entry.
  static Ontology from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  std::optional<DataTypeId> resolve_term(std::string_view term) const;

  /// `id` plus every transitive hyponym. Throws CatalogError on unknown id.
  std::set<DataTypeId> expand_hyponyms(const DataTypeId& id) const;

  bool contains(const DataTypeId& id) const { return types_.count(id) != 0; }
  const DataType& at(const DataTypeId& id) const;
  const std::map<DataTypeId, DataType>& types() const { return types_; }
  std::vector<DataTypeId> core_types() const;
  const std::set<std::pair<DataTypeId, DataTypeId>>& hypernym_edges() const {
    return edges_;
  }

  bool operator==(const Ontology& other) const {
    return types_ == other.types_ && synonyms_ == other.synonyms_ &&
           edges_ == other.edges_;
  }

private:
  std::map<DataTypeId, DataType> types_;
  std::map<std::string, DataTypeId> synonyms_;
  // (hyponym, hypernym)
  std::set<std::pair<DataTypeId, DataTypeId>> edges_;
  std::map<DataTypeId, std::vector<DataTypeId>> hyponyms_;
};

Ontology load_ontology(const nlohmann::json& doc);
Ontology load_ontology_file(const std::string& path);
const Ontology& default_ontology();

} // namespace sdkpriv
