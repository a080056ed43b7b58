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

#include "taint_oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace sdkpriv::testing {

using nlohmann::json;

namespace {

struct Pat {
  std::string text;
  int rank;
  std::size_t len;
};

Pat make_pat(const std::string& text) {
  if (text.back() == '*') {
    return {text.substr(0, text.size() - 1), 0, text.size() - 1};
  }
  if (text.find('(') != std::string::npos) {
    return {text, 2, text.find('(')};
  }
  return {text, 1, text.size()};
}

bool pat_matches(const Pat& p, const std::string& qualified, const std::string& full) {
  switch (p.rank) {
  case 2:
    return full == p.text;
  case 1:
    return qualified == p.text;
  default:
    return qualified.rfind(p.text, 0) == 0;
  }
}

struct Src {
  Pat pat;
  std::string type;
  std::string kind;
  std::string key;
  std::string guard;
  bool holds = true;
};

struct Snk {
  Pat pat;
  Channel channel;
};

template <typename T>
const T* best(const std::vector<T>& list, const std::function<bool(const T&)>& ok) {
  const T* b = nullptr;
  for (const auto& x : list) {
    if (ok(x) && (!b || std::make_pair(x.pat.rank, x.pat.len) >
                            std::make_pair(b->pat.rank, b->pat.len))) {
      b = &x;
    }
  }
  return b;
}

std::string vnode(const MethodRef& m, const std::string& v) {
  return "v:" + m.str() + ":" + v;
}
std::string snode(const Site& s) { return "s:" + s.str(); }

// Counts simple paths of exactly `len` edges from `at` to `goal`.
std::size_t count_paths(
    const std::map<std::string, std::vector<std::pair<std::string, Site>>>& adj,
    const std::string& at, const std::string& goal, std::size_t len,
    std::set<std::string>& on_path, std::size_t cap) {
  if (len == 0) {
    return at == goal ? 1 : 0;
  }
  auto it = adj.find(at);
  if (it == adj.end()) {
    return 0;
  }
  std::size_t total = 0;
  for (const auto& [to, via] : it->second) {
    if (on_path.count(to)) {
      continue;
    }
    on_path.insert(to);
    total += count_paths(adj, to, goal, len - 1, on_path, cap);
    on_path.erase(to);
    if (total >= cap) {
      return cap;
    }
  }
  return total;
}

} // namespace

OracleResult brute_force_taint(const ProgramUnit& unit, const json& catalog,
                               const AnalysisOptions& options) {
  std::vector<Src> srcs;
  for (const auto& s : catalog.value("sources", json::array())) {
    Src x{make_pat(s.at("method")), s.at("data_type"), s.value("access_kind", "api_call"),
          s.value("key", ""), "", true};
    if (s.contains("guard")) {
      x.guard = s["guard"]["predicate"];
      x.holds = s["guard"].value("holds", true);
    }
    srcs.push_back(x);
  }
  std::vector<Snk> snks;
  for (const auto& s : catalog.value("sinks", json::array())) {
    snks.push_back({make_pat(s.at("method")), *parse_channel(s.at("channel").get<std::string>())});
  }

  // Call depth by relaxation.
  std::map<MethodRef, std::size_t> depth;
  std::map<MethodRef, std::set<std::size_t>> reached;
  for (const auto& e : unit.entry_points) {
    depth[e] = 0;
  }
  auto explore = [&](const Method& m) {
    std::set<std::size_t> seen;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i >= m.body.size()) {
        return;
      }
      seen.insert(i);
      const auto& ins = m.body[i];
      if (ins.kind == OpKind::ret) {
        return;
      }
      if (ins.kind == OpKind::branch) {
        if (*ins.target <= i) {
          throw std::logic_error("oracle needs forward branches");
        }
        go(*ins.target);
        if (!ins.condition) {
          return;
        }
      }
      go(i + 1);
    };
    go(0);
    return seen;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [ref, d] : std::map<MethodRef, std::size_t>(depth)) {
      const auto& m = unit.methods.at(ref);
      if (!reached.count(ref)) {
        reached[ref] = explore(m);
      }
      for (auto i : reached[ref]) {
        const auto& ins = m.body[i];
        if (ins.kind == OpKind::call && !ins.external) {
          auto it = depth.find(*ins.callee);
          if (it == depth.end() || it->second > d + 1) {
            depth[*ins.callee] = d + 1;
            changed = true;
          }
        }
      }
    }
  }
  std::set<MethodRef> live;
  for (const auto& [ref, d] : depth) {
    if (d <= options.call_depth_bound) {
      live.insert(ref);
    }
  }

  OracleResult out;
  std::map<std::string, std::vector<std::pair<std::string, Site>>> adj;
  auto edge = [&](const std::string& a, const std::string& b, const Site& via) {
    out.edges.emplace(a, b, via);
  };
  struct SrcSite {
    Site site;
    const Src* spec;
    std::optional<std::string> dst;
  };
  std::vector<SrcSite> sources;
  std::map<Site, Channel> sinks;
  std::map<Site, std::vector<std::pair<std::string, bool>>> reqs;

  for (const auto& ref : live) {
    const auto& m = unit.methods.at(ref);
    for (auto i : reached[ref]) {
      const auto& ins = m.body[i];
      Site site{ref, i};
      std::string q = ins.callee ? ins.callee->qualified_name() : "";
      std::string full = ins.callee ? ins.callee->str() : "";
      if (ins.kind == OpKind::assign) {
        for (const auto& o : ins.operands) {
          edge(vnode(ref, o), vnode(ref, *ins.dst), site);
        }
      } else if (ins.kind == OpKind::call && ins.external) {
        const Snk* k = best<Snk>(snks, [&](const Snk& s) { return pat_matches(s.pat, q, full); });
        if (k) {
          sinks[site] = k->channel;
          for (const auto& o : ins.operands) {
            edge(vnode(ref, o), snode(site), site);
          }
          continue;
        }
        if (ins.dst) {
          for (const auto& o : ins.operands) {
            edge(vnode(ref, o), vnode(ref, *ins.dst), site);
          }
        }
        const Src* s = best<Src>(srcs, [&](const Src& x) {
          return x.kind == "api_call" && pat_matches(x.pat, q, full);
        });
        if (s) {
          sources.push_back({site, s, ins.dst});
          if (!s->guard.empty() && !ins.operands.empty()) {
            auto& r = reqs[site];
            for (auto j : reached[ref]) {
              const auto& p = m.body[j];
              if (p.kind == OpKind::call && p.dst && !p.operands.empty() &&
                  p.operands[0] == ins.operands[0] &&
                  p.callee->qualified_name() == s->guard) {
                r.emplace_back(*p.dst, s->holds);
              }
            }
          }
        }
      } else if (ins.kind == OpKind::call) {
        if (!live.count(*ins.callee)) {
          continue;
        }
        const auto& c = unit.methods.at(*ins.callee);
        for (std::size_t k = 0; k < ins.operands.size(); ++k) {
          edge(vnode(ref, ins.operands[k]), vnode(c.ref, c.params[k]), site);
        }
        if (ins.dst) {
          for (auto j : reached[c.ref]) {
            if (c.body[j].kind == OpKind::ret && !c.body[j].operands.empty()) {
              edge(vnode(c.ref, c.body[j].operands[0]), vnode(ref, *ins.dst), Site{c.ref, j});
            }
          }
        }
      } else if (ins.kind == OpKind::field_write) {
        edge(vnode(ref, ins.operands[0]), "f:" + *ins.field, site);
      } else if (ins.kind == OpKind::field_read) {
        edge("f:" + *ins.field, vnode(ref, *ins.dst), site);
        const Src* s = best<Src>(srcs, [&](const Src& x) {
          return x.kind == "field_constant" && pat_matches(x.pat, *ins.field, "");
        });
        if (s) {
          sources.push_back({site, s, ins.dst});
        }
      } else if (ins.kind == OpKind::settings_read) {
        std::optional<std::string> key;
        for (const auto& d : m.body) {
          if (d.kind == OpKind::constant && d.dst == ins.operands[0]) {
            key = d.literal;
          }
        }
        if (!key) {
          continue;
        }
        const Src* s = best<Src>(srcs, [&](const Src& x) {
          return x.kind == "settings_key" && x.key == *key && pat_matches(x.pat, q, full);
        });
        if (s) {
          sources.push_back({site, s, ins.dst});
        }
      } else if (ins.kind == OpKind::settings_write) {
        const Snk* k = best<Snk>(snks, [&](const Snk& s) { return pat_matches(s.pat, q, full); });
        if (!k && !options.settings_writes_as_sinks) {
          continue;
        }
        sinks[site] = k ? k->channel : Channel::system_settings;
        for (const auto& o : ins.operands) {
          edge(vnode(ref, o), snode(site), site);
        }
      }
    }
  }

  // Guard feasibility by enumerating every CFG path.
  for (const auto& ref : live) {
    const auto& m = unit.methods.at(ref);
    std::function<void(std::size_t, std::map<std::string, bool>)> walk =
        [&](std::size_t i, std::map<std::string, bool> a) {
          if (i >= m.body.size()) {
            return;
          }
          Site here{ref, i};
          bool ok = true;
          for (const auto& [v, h] : reqs[here]) {
            if (a.count(v) && a[v] != h) {
              ok = false;
            }
          }
          if (ok) {
            out.feasible_sites.insert(here);
          }
          const auto& ins = m.body[i];
          if (ins.kind == OpKind::ret) {
            return;
          }
          if (ins.kind != OpKind::branch) {
            walk(i + 1, a);
            return;
          }
          if (!ins.condition) {
            walk(*ins.target, a);
            return;
          }
          const auto& c = *ins.condition;
          for (bool taken : {true, false}) {
            bool val = taken == c.when;
            if (a.count(c.value) && a[c.value] != val) {
              continue;
            }
            auto b = a;
            b[c.value] = val;
            walk(taken ? *ins.target : i + 1, b);
          }
        };
    walk(0, {});
  }

  for (const auto& s : sources) {
    out.hits.emplace(s.site, s.spec->type);
  }

  std::map<std::string, std::vector<std::pair<std::string, Site>>> all_adj, ok_adj;
  for (const auto& [a, b, via] : out.edges) {
    all_adj[a].emplace_back(b, via);
    if (out.feasible_sites.count(via)) {
      ok_adj[a].emplace_back(b, via);
    }
  }
  auto shortest = [&](const auto& g, const std::string& from, const std::string& goal)
      -> std::pair<std::size_t, std::size_t> {
    // Plain reachability first, then deepen until the first hit.
    std::set<std::string> seen{from};
    std::vector<std::string> stack{from};
    while (!stack.empty()) {
      auto n = stack.back();
      stack.pop_back();
      auto it = g.find(n);
      if (it == g.end()) {
        continue;
      }
      for (const auto& [to, via] : it->second) {
        if (seen.insert(to).second) {
          stack.push_back(to);
        }
      }
    }
    if (!seen.count(goal)) {
      return {0, 0};
    }
    for (std::size_t len = 1;; ++len) {
      std::set<std::string> on{from};
      auto c = count_paths(g, from, goal, len, on, options.path_bound);
      if (c) {
        return {len, c};
      }
    }
  };

  for (const auto& s : sources) {
    if (!s.dst) {
      continue;
    }
    auto start = vnode(s.site.method, *s.dst);
    for (const auto& [site, channel] : sinks) {
      auto [len, count] = shortest(all_adj, start, snode(site));
      if (!len) {
        continue;
      }
      OracleTrace t{s.site, site, s.spec->type, channel, Feasibility::infeasible_guard,
                    len + 1, count};
      if (out.feasible_sites.count(s.site)) {
        auto [flen, fcount] = shortest(ok_adj, start, snode(site));
        if (flen) {
          t.feasibility = Feasibility::feasible;
          t.length = flen + 1;
          t.count = fcount;
        }
      }
      out.traces.push_back(t);
    }
  }
  std::sort(out.traces.begin(), out.traces.end());
  return out;
}

OracleTrace oracle_key(const TaintTrace& t) {
  return {t.source, t.sink, t.data_type, t.channel, t.feasibility, t.path.size(),
          t.path_count};
}

bool path_walks_edges(const OracleResult& oracle, const ProgramUnit& unit,
                      const TaintTrace& t) {
  if (t.path.empty() || !(t.path.front() == t.source) || !(t.path.back() == t.sink)) {
    return false;
  }
  const auto& src = unit.at(t.source);
  if (!src.dst) {
    return false;
  }
  std::set<std::string> frontier{vnode(t.source.method, *src.dst)};
  for (std::size_t k = 1; k < t.path.size(); ++k) {
    std::set<std::string> next;
    for (const auto& [a, b, via] : oracle.edges) {
      if (via == t.path[k] && frontier.count(a)) {
        next.insert(b);
      }
    }
    frontier = std::move(next);
  }
  return frontier.count(snode(t.sink)) != 0;
}

std::optional<std::string> engine_vs_oracle(const ProgramUnit& unit,
                                            const nlohmann::json& catalog_doc,
                                            const TaintCatalog& catalog,
                                            const AnalysisOptions& options) {
  auto got = analyze(unit, catalog, options);
  auto want = brute_force_taint(unit, catalog_doc, options);
  std::vector<OracleTrace> keys;
  for (const auto& t : got.traces) {
    keys.push_back(oracle_key(t));
    if (!path_walks_edges(want, unit, t)) {
      return "trace " + t.id + " path leaves the value graph";
    }
  }
  std::sort(keys.begin(), keys.end());
  if (keys != want.traces) {
    return "trace sets differ: engine " + std::to_string(keys.size()) + ", oracle " +
           std::to_string(want.traces.size());
  }
  std::set<std::pair<Site, std::string>> hits;
  for (const auto& h : got.source_hits) {
    hits.emplace(h.site, h.data_type);
  }
  if (hits != want.hits) {
    return std::string("source hits differ");
  }
  return std::nullopt;
}

} // namespace sdkpriv::testing
