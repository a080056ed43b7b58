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

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sdkpriv {

/// Unique method key: (class, name, descriptor). An empty signature is
/// allowed for external references that do not pin an overload.
struct MethodRef {
  std::string class_name;
  std::string method_name;
  std::string signature;

  /// Parses `pkg.Class.method(args)ret`; the descriptor part is optional.
  static std::optional<MethodRef> parse(std::string_view text);

  std::string qualified_name() const { return class_name + "." + method_name; }
  std::string str() const { return qualified_name() + signature; }

  auto operator<=>(const MethodRef&) const = default;
  bool operator==(const MethodRef&) const = default;
};

enum class OpKind {
  call,
  assign,
  constant,
  branch,
  ret,
  field_read,
  field_write,
  settings_read,
  settings_write,
};

std::string_view to_string(OpKind k);
std::optional<OpKind> parse_op_kind(std::string_view text);

// Branch predicate: jump to target when `value` evaluates to `when`,
// otherwise fall through.
struct Condition {
  std::string value;
  bool when = true;

  bool operator==(const Condition&) const = default;
};

struct Instruction {
  std::size_t index = 0;
  OpKind kind = OpKind::assign;
  std::optional<std::string> dst;
  std::vector<std::string> operands;
  std::optional<MethodRef> callee;
  // Resolved at load: callee is not defined in this unit.
  bool external = false;
  std::optional<std::string> literal;
  std::optional<std::string> field;
  std::optional<Condition> condition;
  std::optional<std::size_t> target;
  std::size_t line = 0;

  bool operator==(const Instruction& o) const {
    return index == o.index && kind == o.kind && dst == o.dst &&
           operands == o.operands && callee == o.callee &&
           external == o.external && literal == o.literal && field == o.field &&
           condition == o.condition && target == o.target;
  }
};

struct Method {
  MethodRef ref;
  std::vector<std::string> params;
  std::vector<Instruction> body;
  bool entry = false;

  bool operator==(const Method&) const = default;
};

// A (method, instruction index) location.
struct Site {
  MethodRef method;
  std::size_t index = 0;

  std::string str() const { return method.str() + "@" + std::to_string(index); }

  auto operator<=>(const Site&) const = default;
  bool operator==(const Site&) const = default;
};

struct ProgramUnit {
  std::string sdk_id;
  std::string version;
  // Class-name prefixes owned by the SDK. A call into one of them must
  // resolve to a defined method.
  std::vector<std::string> packages;
  std::map<MethodRef, Method> methods;
  std::vector<MethodRef> entry_points;

  const Method* find(const MethodRef& ref) const;
  const Instruction& at(const Site& site) const;

  bool operator==(const ProgramUnit&) const = default;
};

inline constexpr int kProgramSchemaVersion = 1;

/// Parses the line-delimited program-facts document. Throws ProgramError with
/// the offending line on malformed records, dangling intra-unit callees and
/// duplicate methods.
ProgramUnit load_program(std::string_view document);
ProgramUnit load_program_file(const std::string& path);

/// Renders a unit back to the document format; load_program(to_document(u))
/// reproduces u.
std::string to_document(const ProgramUnit& unit);

class CallGraph {
public:
  explicit CallGraph(const ProgramUnit& unit);

  const std::set<MethodRef>& nodes() const { return nodes_; }
  const std::set<MethodRef>& callees(const MethodRef& m) const;
  const std::set<MethodRef>& callers(const MethodRef& m) const;
  bool has_edge(const MethodRef& from, const MethodRef& to) const;
  bool is_external(const MethodRef& m) const { return external_.count(m) != 0; }
  std::size_t edge_count() const;

private:
  std::set<MethodRef> nodes_;
  std::set<MethodRef> external_;
  std::map<MethodRef, std::set<MethodRef>> out_;
  std::map<MethodRef, std::set<MethodRef>> in_;
};

CallGraph call_graph(const ProgramUnit& unit);

} // namespace sdkpriv
