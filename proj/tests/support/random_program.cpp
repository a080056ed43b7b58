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

#include "random_program.hpp"

#include <random>
#include <vector>

namespace sdkpriv::testing {

using nlohmann::json;

json toy_catalog_json() {
  return json::parse(R"({
    "schema_version": 1,
    "sources": [
      {"method": "t.Src.imei", "data_type": "imei"},
      {"method": "t.Src.loc", "data_type": "location"},
      {"method": "t.Src.apps()Ljava/util/List;", "data_type": "app_list"},
      {"method": "t.Field.SERIAL", "data_type": "serial", "access_kind": "field_constant"},
      {"method": "t.Set.get", "data_type": "android_id", "access_kind": "settings_key", "key": "k1"},
      {"method": "t.Net.extra", "data_type": "ssid_bssid",
       "guard": {"predicate": "t.Net.ok", "holds": true}}
    ],
    "sinks": [
      {"method": "t.Snk.net", "channel": "network"},
      {"method": "t.Snk.file", "channel": "file"},
      {"method": "t.Set.put", "channel": "system_settings"}
    ]
  })");
}

namespace {

struct Gen {
  std::mt19937_64 rng;

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng); }
};

struct Sig {
  std::string name;
  std::size_t arity;
};

} // namespace

std::string random_program(std::uint64_t seed, const GeneratorOptions& opts) {
  Gen g{std::mt19937_64(seed)};
  std::size_t n_methods = 1 + g.pick(opts.max_methods);
  std::vector<Sig> methods;
  for (std::size_t m = 0; m < n_methods; ++m) {
    auto arity = g.pick(3);
    std::string desc = "(";
    for (std::size_t k = 0; k < arity; ++k) {
      desc += "I";
    }
    methods.push_back({"t.app.M.m" + std::to_string(m) + desc + ")I", arity});
  }
  std::size_t budget = opts.max_instructions;

  std::string out =
      json{{"schema_version", 1}, {"sdk_id", "rand" + std::to_string(seed)},
           {"version", "0"}, {"packages", {"t.app"}}}
          .dump() +
      "\n";
  for (std::size_t m = 0; m < n_methods; ++m) {
    std::size_t share = budget / (n_methods - m);
    std::size_t len = std::min<std::size_t>(share, 3 + g.pick(28));
    budget -= len;

    std::vector<std::string> defined;
    for (std::size_t k = 0; k < methods[m].arity; ++k) {
      defined.push_back("p" + std::to_string(k));
    }
    bool entry = m == 0 ? g.chance(0.8) : g.chance(0.2);
    json head = {{"method", methods[m].name}, {"params", defined}};
    if (entry) {
      head["entry"] = true;
    }
    out += head.dump() + "\n";

    std::vector<std::string> preds;   // results of t.Net.ok
    std::vector<std::string> objects; // receivers for t.Net.*
    std::size_t branches = 0;
    std::size_t counter = 0;
    auto fresh = [&] { return "v" + std::to_string(counter++); };
    auto operand = [&]() -> std::string { return defined[g.pick(defined.size())]; };

    for (std::size_t i = 0; i < len; ++i) {
      json ins;
      auto roll = g.pick(100);
      bool last = i + 1 == len;
      if (last && g.chance(0.7)) {
        ins = {{"op", "return"}};
        if (!defined.empty()) {
          ins["args"] = {operand()};
        }
      } else if (roll < 12) {
        static const char* sources[] = {"t.Src.imei()Ljava/lang/String;",
                                        "t.Src.loc()D", "t.Src.apps()Ljava/util/List;",
                                        "t.Src.apps(I)Ljava/util/List;"};
        auto d = fresh();
        ins = {{"op", "call"}, {"dst", d}, {"callee", sources[g.pick(4)]}, {"args", json::array()}};
        defined.push_back(d);
      } else if (roll < 18) {
        // network info object, its predicate, or the guarded read
        auto d = fresh();
        if (objects.empty() || g.chance(0.3)) {
          ins = {{"op", "call"}, {"dst", d}, {"callee", "t.Net.info()Lt/Net;"}, {"args", json::array()}};
          objects.push_back(d);
        } else if (g.chance(0.5)) {
          ins = {{"op", "call"}, {"dst", d}, {"callee", "t.Net.ok()Z"},
                 {"args", {objects[g.pick(objects.size())]}}};
          preds.push_back(d);
        } else {
          ins = {{"op", "call"}, {"dst", d}, {"callee", "t.Net.extra()Ljava/lang/String;"},
                 {"args", {objects[g.pick(objects.size())]}}};
        }
        defined.push_back(d);
      } else if (roll < 30 && !defined.empty()) {
        static const char* sinks[] = {"t.Snk.net(Ljava/lang/String;)V",
                                      "t.Snk.file(Ljava/lang/String;)V"};
        ins = {{"op", "call"}, {"callee", sinks[g.pick(2)]}, {"args", {operand()}}};
        if (g.chance(0.2)) {
          auto d = fresh();
          ins["dst"] = d;
          defined.push_back(d);
        }
      } else if (roll < 42 && !defined.empty()) {
        auto d = fresh();
        json args = {operand()};
        if (g.chance(0.4)) {
          args.push_back(operand());
        }
        ins = {{"op", "call"}, {"dst", d}, {"callee", "t.Lib.mix(II)I"}, {"args", args}};
        defined.push_back(d);
      } else if (roll < 52) {
        const auto& callee = methods[g.pick(n_methods)];
        if (defined.empty() && callee.arity > 0) {
          auto d = fresh();
          out += json{{"op", "const"}, {"dst", d}, {"value", "x"}}.dump() + "\n";
          defined.push_back(d);
          continue;
        }
        json args = json::array();
        for (std::size_t k = 0; k < callee.arity; ++k) {
          args.push_back(operand());
        }
        ins = {{"op", "call"}, {"callee", callee.name}, {"args", args}};
        if (g.chance(0.8)) {
          auto d = fresh();
          ins["dst"] = d;
          defined.push_back(d);
        }
      } else if (roll < 60 && !defined.empty()) {
        auto d = fresh();
        ins = {{"op", "assign"}, {"dst", d}, {"args", {operand()}}};
        defined.push_back(d);
      } else if (roll < 64) {
        auto d = fresh();
        static const char* lits[] = {"k1", "k2", "x"};
        ins = {{"op", "const"}, {"dst", d}, {"value", lits[g.pick(3)]}};
        defined.push_back(d);
      } else if (roll < 70 && !defined.empty()) {
        static const char* fields[] = {"t.C.f1", "t.C.f2"};
        ins = {{"op", "field_write"}, {"field", fields[g.pick(2)]}, {"args", {operand()}}};
      } else if (roll < 76) {
        static const char* fields[] = {"t.C.f1", "t.C.f2", "t.Field.SERIAL"};
        auto d = fresh();
        ins = {{"op", "field_read"}, {"dst", d}, {"field", fields[g.pick(3)]}};
        defined.push_back(d);
      } else if (roll < 81 && !defined.empty()) {
        auto d = fresh();
        ins = {{"op", "settings_read"}, {"dst", d}, {"callee", "t.Set.get(Ljava/lang/String;)Ljava/lang/String;"},
               {"args", {operand()}}};
        defined.push_back(d);
      } else if (roll < 85 && !defined.empty()) {
        static const char* writers[] = {"t.Set.put(Ljava/lang/String;Ljava/lang/String;)V",
                                        "t.Set.other(Ljava/lang/String;Ljava/lang/String;)V"};
        ins = {{"op", "settings_write"}, {"callee", writers[g.pick(2)]},
               {"args", {operand(), operand()}}};
      } else if (roll < 95 && !last && branches < opts.max_branches_per_method) {
        ++branches;
        auto target = i + 1 + g.pick(len - i - 1);
        ins = {{"op", "branch"}, {"target", target}};
        if (!preds.empty() && g.chance(0.75)) {
          ins["cond"] = preds[g.pick(preds.size())];
          ins["when"] = g.chance(0.5);
        } else if (!defined.empty() && g.chance(0.7)) {
          ins["cond"] = operand();
          ins["when"] = g.chance(0.5);
        }
      } else if (g.chance(0.3)) {
        ins = {{"op", "return"}};
      } else {
        auto d = fresh();
        ins = {{"op", "const"}, {"dst", d}, {"value", "x"}};
        defined.push_back(d);
      }
      out += ins.dump() + "\n";
    }
  }
  return out;
}

} // namespace sdkpriv::testing
