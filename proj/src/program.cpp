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

#include "sdkpriv/program.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sdkpriv/error.hpp"

namespace sdkpriv {

namespace {

using nlohmann::json;

bool in_packages(const std::vector<std::string>& packages,
                 const std::string& class_name) {
  for (const auto& p : packages) {
    if (class_name == p) {
      return true;
    }
    if (class_name.size() > p.size() && class_name.compare(0, p.size(), p) == 0 &&
        (class_name[p.size()] == '.' || class_name[p.size()] == '$')) {
      return true;
    }
  }
  return false;
}

std::string required_string(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw ProgramError(std::string("missing string field '") + key + "'", line);
  }
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& rec, const char* key,
                                     std::size_t line) {
  std::vector<std::string> out;
  auto it = rec.find(key);
  if (it == rec.end()) {
    return out;
  }
  if (!it->is_array()) {
    throw ProgramError(std::string("'") + key + "' must be a list", line);
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ProgramError(std::string("'") + key + "' entries must be strings",
                         line);
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

MethodRef parse_ref(const std::string& text, std::size_t line) {
  auto ref = MethodRef::parse(text);
  if (!ref) {
    throw ProgramError("malformed method reference '" + text + "'", line);
  }
  return *ref;
}

struct MethodBuilder {
  Method method;
  std::size_t line = 0;
  std::set<std::string> defined;
};

void check_operand(const MethodBuilder& b, const std::string& v,
                   std::size_t line) {
  if (!b.defined.count(v)) {
    throw ProgramError("operand '" + v + "' is not a parameter or an earlier "
                       "definition in " + b.method.ref.str(),
                       line);
  }
}

Instruction parse_instruction(const json& rec, MethodBuilder& b,
                              std::size_t line) {
  Instruction ins;
  ins.index = b.method.body.size();
  ins.line = line;
  auto op = parse_op_kind(required_string(rec, "op", line));
  if (!op) {
    throw ProgramError("unknown op '" + rec.at("op").get<std::string>() + "'",
                       line);
  }
  ins.kind = *op;
  if (rec.contains("dst")) {
    ins.dst = required_string(rec, "dst", line);
  }
  ins.operands = string_list(rec, "args", line);
  if (rec.contains("callee")) {
    ins.callee = parse_ref(required_string(rec, "callee", line), line);
  }
  if (rec.contains("field")) {
    ins.field = required_string(rec, "field", line);
  }

  auto need = [&](bool ok, const char* what) {
    if (!ok) {
      throw ProgramError(std::string(to_string(ins.kind)) + ": " + what, line);
    }
  };

  switch (ins.kind) {
  case OpKind::call:
    need(ins.callee.has_value(), "requires 'callee'");
    break;
  case OpKind::assign:
    need(ins.dst.has_value(), "requires 'dst'");
    need(!ins.operands.empty(), "requires at least one operand");
    break;
  case OpKind::constant:
    need(ins.dst.has_value(), "requires 'dst'");
    need(ins.operands.empty(), "takes no operands");
    need(rec.contains("value") && rec.at("value").is_string(),
         "requires string 'value'");
    ins.literal = rec.at("value").get<std::string>();
    break;
  case OpKind::branch: {
    need(!ins.dst.has_value() && ins.operands.empty(),
         "takes no dst or operands; use 'cond'");
    need(rec.contains("target") && rec.at("target").is_number_unsigned(),
         "requires non-negative integer 'target'");
    ins.target = rec.at("target").get<std::size_t>();
    if (rec.contains("cond")) {
      Condition c;
      c.value = required_string(rec, "cond", line);
      if (rec.contains("when")) {
        need(rec.at("when").is_boolean(), "'when' must be a boolean");
        c.when = rec.at("when").get<bool>();
      }
      ins.condition = c;
    } else {
      need(!rec.contains("when"), "'when' without 'cond'");
    }
    break;
  }
  case OpKind::ret:
    need(!ins.dst.has_value(), "takes no dst");
    need(ins.operands.size() <= 1, "takes at most one operand");
    break;
  case OpKind::field_read:
    need(ins.dst.has_value(), "requires 'dst'");
    need(ins.field.has_value(), "requires 'field'");
    need(ins.operands.empty(), "takes no operands");
    break;
  case OpKind::field_write:
    need(ins.field.has_value(), "requires 'field'");
    need(!ins.dst.has_value(), "takes no dst");
    need(ins.operands.size() == 1, "takes exactly one operand");
    break;
  case OpKind::settings_read:
    need(ins.dst.has_value(), "requires 'dst'");
    need(ins.callee.has_value(), "requires 'callee'");
    need(ins.operands.size() == 1, "takes exactly one operand (key)");
    break;
  case OpKind::settings_write:
    need(ins.callee.has_value(), "requires 'callee'");
    need(!ins.dst.has_value(), "takes no dst");
    need(ins.operands.size() == 2, "takes exactly two operands (key, value)");
    break;
  }
  if (ins.kind != OpKind::call && ins.kind != OpKind::settings_read &&
      ins.kind != OpKind::settings_write) {
    need(!ins.callee.has_value(), "does not take 'callee'");
  }
  if (ins.kind != OpKind::field_read && ins.kind != OpKind::field_write) {
    need(!ins.field.has_value(), "does not take 'field'");
  }

  for (const auto& v : ins.operands) {
    check_operand(b, v, line);
  }
  if (ins.condition) {
    check_operand(b, ins.condition->value, line);
  }
  if (ins.dst) {
    if (!b.defined.insert(*ins.dst).second) {
      throw ProgramError("value '" + *ins.dst + "' is assigned more than once",
                         line);
    }
  }
  return ins;
}

void finish_method(MethodBuilder& b, ProgramUnit& unit) {
  for (const auto& ins : b.method.body) {
    if (ins.target && *ins.target >= b.method.body.size()) {
      throw ProgramError("branch target " + std::to_string(*ins.target) +
                             " is out of range",
                         ins.line);
    }
  }
  auto ref = b.method.ref;
  if (!unit.methods.emplace(ref, std::move(b.method)).second) {
    throw ProgramError("duplicate method " + ref.str(), b.line);
  }
}

// Callees without a descriptor bind to the unique defined overload.
const Method* resolve(const ProgramUnit& unit, const MethodRef& callee) {
  if (auto* m = unit.find(callee)) {
    return m;
  }
  if (!callee.signature.empty()) {
    return nullptr;
  }
  const Method* found = nullptr;
  auto lo = unit.methods.lower_bound(MethodRef{callee.class_name,
                                               callee.method_name, ""});
  for (auto it = lo; it != unit.methods.end() &&
                     it->first.class_name == callee.class_name &&
                     it->first.method_name == callee.method_name;
       ++it) {
    if (found) {
      return nullptr;
    }
    found = &it->second;
  }
  return found;
}

} // namespace

std::optional<MethodRef> MethodRef::parse(std::string_view text) {
  auto paren = text.find('(');
  std::string_view qualified = text.substr(0, paren);
  std::string_view sig =
      paren == std::string_view::npos ? std::string_view{} : text.substr(paren);
  auto dot = qualified.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == qualified.size()) {
    return std::nullopt;
  }
  if (!sig.empty() && sig.find(')') == std::string_view::npos) {
    return std::nullopt;
  }
  return MethodRef{std::string(qualified.substr(0, dot)),
                   std::string(qualified.substr(dot + 1)), std::string(sig)};
}

std::string_view to_string(OpKind k) {
  switch (k) {
  case OpKind::call:
    return "call";
  case OpKind::assign:
    return "assign";
  case OpKind::constant:
    return "const";
  case OpKind::branch:
    return "branch";
  case OpKind::ret:
    return "return";
  case OpKind::field_read:
    return "field_read";
  case OpKind::field_write:
    return "field_write";
  case OpKind::settings_read:
    return "settings_read";
  case OpKind::settings_write:
    return "settings_write";
  }
  return "assign";
}

std::optional<OpKind> parse_op_kind(std::string_view text) {
  static constexpr OpKind all[] = {
      OpKind::call,       OpKind::assign,      OpKind::constant,
      OpKind::branch,     OpKind::ret,         OpKind::field_read,
      OpKind::field_write, OpKind::settings_read, OpKind::settings_write};
  for (OpKind k : all) {
    if (to_string(k) == text) {
      return k;
    }
  }
  return std::nullopt;
}

const Method* ProgramUnit::find(const MethodRef& ref) const {
  auto it = methods.find(ref);
  return it == methods.end() ? nullptr : &it->second;
}

const Instruction& ProgramUnit::at(const Site& site) const {
  return methods.at(site.method).body.at(site.index);
}

ProgramUnit load_program(std::string_view document) {
  ProgramUnit unit;
  bool have_header = false;
  std::optional<MethodBuilder> current;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    auto eol = document.find('\n', pos);
    if (eol == std::string_view::npos) {
      eol = document.size();
    }
    std::string_view raw = document.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || raw[first] == '#') {
      if (eol == document.size()) {
        break;
      }
      continue;
    }

    json rec;
    try {
      rec = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ProgramError(std::string("invalid JSON record: ") + e.what(),
                         line_no);
    }
    if (!rec.is_object()) {
      throw ProgramError("record must be a JSON object", line_no);
    }

    if (!have_header) {
      if (!rec.contains("schema_version")) {
        throw ProgramError("first record must be a header with schema_version",
                           line_no);
      }
      if (rec.at("schema_version") != kProgramSchemaVersion) {
        throw ProgramError("unsupported schema_version " +
                               rec.at("schema_version").dump(),
                           line_no);
      }
      unit.sdk_id = required_string(rec, "sdk_id", line_no);
      unit.version = rec.value("version", std::string{});
      unit.packages = string_list(rec, "packages", line_no);
      have_header = true;
    } else if (rec.contains("method")) {
      if (current) {
        finish_method(*current, unit);
      }
      current.emplace();
      current->line = line_no;
      current->method.ref = parse_ref(required_string(rec, "method", line_no),
                                      line_no);
      current->method.params = string_list(rec, "params", line_no);
      for (const auto& p : current->method.params) {
        if (!current->defined.insert(p).second) {
          throw ProgramError("duplicate parameter '" + p + "'", line_no);
        }
      }
      if (rec.contains("entry")) {
        if (!rec.at("entry").is_boolean()) {
          throw ProgramError("'entry' must be a boolean", line_no);
        }
        current->method.entry = rec.at("entry").get<bool>();
      }
    } else if (rec.contains("op")) {
      if (!current) {
        throw ProgramError("instruction outside of a method", line_no);
      }
      current->method.body.push_back(parse_instruction(rec, *current, line_no));
    } else {
      throw ProgramError("record is neither a method header nor an instruction",
                         line_no);
    }
    if (eol == document.size()) {
      break;
    }
  }
  if (!have_header) {
    throw ProgramError("document has no header record", 0);
  }
  if (current) {
    finish_method(*current, unit);
  }

  for (auto& [ref, method] : unit.methods) {
    for (auto& ins : method.body) {
      if (ins.kind != OpKind::call) {
        if (ins.callee) {
          ins.external = true;
        }
        continue;
      }
      const Method* target = resolve(unit, *ins.callee);
      if (!target) {
        if (in_packages(unit.packages, ins.callee->class_name)) {
          throw ProgramError("call to undefined method " + ins.callee->str() +
                                 " inside the unit's packages",
                             ins.line);
        }
        ins.external = true;
        continue;
      }
      if (target->params.size() != ins.operands.size()) {
        throw ProgramError("call to " + target->ref.str() + " passes " +
                               std::to_string(ins.operands.size()) +
                               " arguments, expected " +
                               std::to_string(target->params.size()),
                           ins.line);
      }
      ins.callee = target->ref;
      ins.external = false;
    }
    if (method.entry) {
      unit.entry_points.push_back(ref);
    }
  }
  if (unit.entry_points.empty()) {
    for (const auto& [ref, _] : unit.methods) {
      unit.entry_points.push_back(ref);
    }
  }
  return unit;
}

ProgramUnit load_program_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ProgramError("cannot open program facts '" + path + "'", 0);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_program(buf.str());
}

std::string to_document(const ProgramUnit& unit) {
  std::ostringstream out;
  json header = {{"schema", "sdkpriv.program"},
                 {"schema_version", kProgramSchemaVersion},
                 {"sdk_id", unit.sdk_id},
                 {"version", unit.version},
                 {"packages", unit.packages}};
  out << header.dump() << '\n';
  for (const auto& [ref, m] : unit.methods) {
    json h = {{"method", ref.str()}, {"params", m.params}};
    if (m.entry) {
      h["entry"] = true;
    }
    out << h.dump() << '\n';
    for (const auto& ins : m.body) {
      json r = {{"op", std::string(to_string(ins.kind))}};
      if (ins.dst) {
        r["dst"] = *ins.dst;
      }
      if (!ins.operands.empty()) {
        r["args"] = ins.operands;
      }
      if (ins.callee) {
        r["callee"] = ins.callee->str();
      }
      if (ins.literal) {
        r["value"] = *ins.literal;
      }
      if (ins.field) {
        r["field"] = *ins.field;
      }
      if (ins.condition) {
        r["cond"] = ins.condition->value;
        r["when"] = ins.condition->when;
      }
      if (ins.target) {
        r["target"] = *ins.target;
      }
      out << r.dump() << '\n';
    }
  }
  return out.str();
}

CallGraph::CallGraph(const ProgramUnit& unit) {
  for (const auto& [ref, m] : unit.methods) {
    nodes_.insert(ref);
    out_[ref];
  }
  for (const auto& [ref, m] : unit.methods) {
    for (const auto& ins : m.body) {
      if (ins.kind != OpKind::call) {
        continue;
      }
      const auto& callee = *ins.callee;
      nodes_.insert(callee);
      if (ins.external) {
        external_.insert(callee);
      }
      out_[ref].insert(callee);
      in_[callee].insert(ref);
    }
  }
}

const std::set<MethodRef>& CallGraph::callees(const MethodRef& m) const {
  static const std::set<MethodRef> empty;
  auto it = out_.find(m);
  return it == out_.end() ? empty : it->second;
}

const std::set<MethodRef>& CallGraph::callers(const MethodRef& m) const {
  static const std::set<MethodRef> empty;
  auto it = in_.find(m);
  return it == in_.end() ? empty : it->second;
}

bool CallGraph::has_edge(const MethodRef& from, const MethodRef& to) const {
  return callees(from).count(to) != 0;
}

std::size_t CallGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, s] : out_) {
    n += s.size();
  }
  return n;
}

CallGraph call_graph(const ProgramUnit& unit) { return CallGraph(unit); }

} // namespace sdkpriv
