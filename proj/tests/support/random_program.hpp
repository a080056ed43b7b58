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

#include <cstdint>
#include <string>

#include "json.hpp"

namespace sdkpriv::testing {

// Small catalog the generated programs draw their external calls from.
nlohmann::json toy_catalog_json();

struct GeneratorOptions {
  std::size_t max_methods = 6;
  std::size_t max_instructions = 200;
  std::size_t max_branches_per_method = 6;
};

/// Emits a well-formed program-facts document. Branches only jump forward so
/// every method body is acyclic; the call graph may still recurse.
std::string random_program(std::uint64_t seed, const GeneratorOptions& opts = {});

} // namespace sdkpriv::testing
