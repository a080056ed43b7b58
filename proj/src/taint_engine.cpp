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

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "sdkpriv/taint.hpp"

namespace sdkpriv {

namespace {

// Value-graph node: a local value, a (global) field, or a sink site.
struct Node {
  enum Kind { value, field, sink } kind = value;
  MethodRef method;
  std::string name;
  std::size_t index = 0;

  auto operator<=>(const Node&) const = default;
  bool operator==(const Node&) const = default;
};

Node value_node(const MethodRef& m, const std::string& v) {
  return Node{Node::value, m, v, 0};
}
Node field_node(const std::string& f) { return Node{Node::field, {}, f, 0}; }
Node sink_node(const Site& s) { return Node{Node::sink, s.method, {}, s.index}; }

struct Edge {
  Node to;
  Site via;

  auto operator<=>(const Edge&) const = default;
  bool operator==(const Edge&) const = default;
};

using Graph = std::map<Node, std::vector<Edge>>;

struct SourceSite {
  Site site;
  const SourceSpec* spec;
  std::string api;
  std::optional<std::string> dst;
};

struct SinkSite {
  Channel channel;
  std::string api;
};

// Requirement on a branch-predicate value at a site: value must equal `holds`.
using Requirements = std::vector<std::pair<std::string, bool>>;
using Assignment = std::map<std::string, bool>;

std::set<std::size_t> cfg_reachable(const Method& m) {
  std::set<std::size_t> seen;
  if (m.body.empty()) {
    return seen;
  }
  std::vector<std::size_t> stack{0};
  seen.insert(0);
  auto push = [&](std::size_t i) {
    if (i < m.body.size() && seen.insert(i).second) {
      stack.push_back(i);
    }
  };
  while (!stack.empty()) {
    auto i = stack.back();
    stack.pop_back();
    const auto& ins = m.body[i];
    switch (ins.kind) {
    case OpKind::ret:
      break;
    case OpKind::branch:
      push(*ins.target);
      if (ins.condition) {
        push(i + 1);
      }
      break;
    default:
      push(i + 1);
    }
  }
  return seen;
}

bool consistent(const Assignment& a, const Requirements& req) {
  for (const auto& [v, holds] : req) {
    auto it = a.find(v);
    if (it != a.end() && it->second != holds) {
      return false;
    }
  }
  return true;
}

// Explores (instruction, branch-outcome assignment) states from the method
// start. Returns the indices reachable by a non-contradictory path that also
// satisfies the index's requirements, or nullopt when the state bound is hit.
std::optional<std::set<std::size_t>>
feasible_sites(const Method& m, const std::map<std::size_t, Requirements>& reqs,
               std::size_t bound) {
  std::set<std::size_t> out;
  if (m.body.empty()) {
    return out;
  }
  std::set<std::pair<std::size_t, Assignment>> seen;
  std::deque<std::pair<std::size_t, Assignment>> work;
  auto push = [&](std::size_t i, Assignment a) {
    if (i >= m.body.size()) {
      return;
    }
    if (seen.emplace(i, a).second) {
      work.emplace_back(i, std::move(a));
    }
  };
  push(0, {});
  while (!work.empty()) {
    if (seen.size() > bound) {
      return std::nullopt;
    }
    auto [i, a] = std::move(work.front());
    work.pop_front();
    auto rit = reqs.find(i);
    if (rit == reqs.end() || consistent(a, rit->second)) {
      out.insert(i);
    }
    const auto& ins = m.body[i];
    if (ins.dst) {
      a.erase(*ins.dst);
    }
    switch (ins.kind) {
    case OpKind::ret:
      break;
    case OpKind::branch:
      if (!ins.condition) {
        push(*ins.target, a);
        break;
      }
      for (bool taken : {true, false}) {
        const auto& c = *ins.condition;
        bool val = taken ? c.when : !c.when;
        auto it = a.find(c.value);
        if (it != a.end() && it->second != val) {
          continue;
        }
        auto next = a;
        next[c.value] = val;
        push(taken ? *ins.target : i + 1, std::move(next));
      }
      break;
    default:
      push(i + 1, a);
    }
  }
  return out;
}

std::string const_literal(const Method& m, const std::string& value) {
  for (const auto& ins : m.body) {
    if (ins.kind == OpKind::constant && ins.dst == value && ins.literal) {
      return *ins.literal;
    }
  }
  return {};
}

bool has_const(const Method& m, const std::string& value) {
  return std::any_of(m.body.begin(), m.body.end(), [&](const Instruction& ins) {
    return ins.kind == OpKind::constant && ins.dst == value && ins.literal;
  });
}

struct BfsResult {
  std::map<Node, std::size_t> dist;
  std::map<Node, std::size_t> count;
  std::map<Node, std::pair<Node, Site>> parent;
};

BfsResult bfs(const Graph& g, const Node& start, std::size_t cap,
              const std::set<Site>* allowed) {
  BfsResult r;
  r.dist[start] = 0;
  r.count[start] = 1;
  std::deque<Node> work{start};
  while (!work.empty()) {
    auto n = work.front();
    work.pop_front();
    auto it = g.find(n);
    if (it == g.end()) {
      continue;
    }
    auto d = r.dist[n];
    auto c = r.count[n];
    for (const auto& e : it->second) {
      if (allowed && !allowed->count(e.via)) {
        continue;
      }
      auto dit = r.dist.find(e.to);
      if (dit == r.dist.end()) {
        r.dist[e.to] = d + 1;
        r.count[e.to] = std::min(c, cap);
        r.parent.emplace(e.to, std::make_pair(n, e.via));
        work.push_back(e.to);
      } else if (dit->second == d + 1) {
        r.count[e.to] = std::min(r.count[e.to] + c, cap);
      }
    }
  }
  return r;
}

std::vector<Site> path_to(const BfsResult& r, const Node& start,
                          const Node& goal) {
  std::vector<Site> rev;
  Node cur = goal;
  while (!(cur == start)) {
    const auto& [prev, via] = r.parent.at(cur);
    rev.push_back(via);
    cur = prev;
  }
  return {rev.rbegin(), rev.rend()};
}

} // namespace

AnalysisResult analyze(const ProgramUnit& unit, const TaintCatalog& catalog,
                       const AnalysisOptions& options) {
  AnalysisResult result;

  // Method reachability with call depth.
  std::map<MethodRef, std::size_t> depth;
  std::deque<MethodRef> work;
  for (const auto& e : unit.entry_points) {
    if (depth.emplace(e, 0).second) {
      work.push_back(e);
    }
  }
  std::map<MethodRef, std::set<std::size_t>> live;
  while (!work.empty()) {
    auto ref = work.front();
    work.pop_front();
    const Method& m = unit.methods.at(ref);
    auto& cfg = live[ref] = cfg_reachable(m);
    for (auto i : cfg) {
      const auto& ins = m.body[i];
      if (ins.kind == OpKind::call && !ins.external &&
          depth.emplace(*ins.callee, depth[ref] + 1).second) {
        work.push_back(*ins.callee);
      }
    }
  }
  std::set<MethodRef> analyzed;
  for (const auto& [ref, d] : depth) {
    if (d <= options.call_depth_bound) {
      analyzed.insert(ref);
    } else {
      result.diagnostics.push_back(
          {ref.str(), "call depth bound " +
                          std::to_string(options.call_depth_bound) +
                          " exceeded; method not analyzed"});
    }
  }

  Graph graph;
  auto add_edge = [&](const Node& from, const Node& to, const Site& via) {
    graph[from].push_back(Edge{to, via});
  };
  std::vector<SourceSite> sources;
  std::map<Site, SinkSite> sinks;
  std::map<MethodRef, std::map<std::size_t, Requirements>> requirements;

  for (const auto& ref : analyzed) {
    const Method& m = unit.methods.at(ref);
    const auto& cfg = live.at(ref);
    for (auto i : cfg) {
      const auto& ins = m.body[i];
      Site site{ref, i};
      auto flow_to_dst = [&] {
        if (!ins.dst) {
          return;
        }
        for (const auto& op : ins.operands) {
          add_edge(value_node(ref, op), value_node(ref, *ins.dst), site);
        }
      };
      switch (ins.kind) {
      case OpKind::assign:
        flow_to_dst();
        break;
      case OpKind::call:
        if (ins.external) {
          if (const auto* sink = catalog.match_sink(*ins.callee)) {
            sinks[site] = SinkSite{sink->channel, ins.callee->str()};
            for (const auto& op : ins.operands) {
              add_edge(value_node(ref, op), sink_node(site), site);
            }
            break;
          }
          flow_to_dst();
          if (const auto* src = catalog.match_call_source(*ins.callee)) {
            sources.push_back({site, src, ins.callee->str(), ins.dst});
            if (src->guard && !ins.operands.empty()) {
              auto pred = MethodPattern::parse(src->guard->predicate);
              auto& req = requirements[ref][i];
              for (auto j : cfg) {
                const auto& p = m.body[j];
                if (p.kind == OpKind::call && p.dst && !p.operands.empty() &&
                    p.operands[0] == ins.operands[0] && pred.matches(*p.callee)) {
                  req.emplace_back(*p.dst, src->guard->holds);
                }
              }
            }
          }
        } else if (analyzed.count(*ins.callee)) {
          const Method& callee = unit.methods.at(*ins.callee);
          for (std::size_t k = 0; k < ins.operands.size(); ++k) {
            add_edge(value_node(ref, ins.operands[k]),
                     value_node(callee.ref, callee.params[k]), site);
          }
          if (ins.dst) {
            for (auto j : live.at(callee.ref)) {
              const auto& r = callee.body[j];
              if (r.kind != OpKind::ret) {
                continue;
              }
              for (const auto& op : r.operands) {
                add_edge(value_node(callee.ref, op), value_node(ref, *ins.dst),
                         Site{callee.ref, j});
              }
            }
          }
        }
        break;
      case OpKind::field_write:
        for (const auto& op : ins.operands) {
          add_edge(value_node(ref, op), field_node(*ins.field), site);
        }
        break;
      case OpKind::field_read:
        if (ins.dst) {
          add_edge(field_node(*ins.field), value_node(ref, *ins.dst), site);
        }
        if (const auto* src = catalog.match_field_source(*ins.field)) {
          sources.push_back({site, src, *ins.field, ins.dst});
        }
        break;
      case OpKind::settings_read:
        if (!ins.operands.empty() && has_const(m, ins.operands[0])) {
          auto key = const_literal(m, ins.operands[0]);
          if (const auto* src = catalog.match_settings_source(*ins.callee, key)) {
            sources.push_back({site, src, ins.callee->str(), ins.dst});
          }
        }
        break;
      case OpKind::settings_write: {
        const auto* sink = catalog.match_sink(*ins.callee);
        if (!sink && !options.settings_writes_as_sinks) {
          break;
        }
        sinks[site] = SinkSite{sink ? sink->channel : Channel::system_settings,
                               ins.callee->str()};
        for (const auto& op : ins.operands) {
          add_edge(value_node(ref, op), sink_node(site), site);
        }
        break;
      }
      case OpKind::constant:
      case OpKind::branch:
      case OpKind::ret:
        break;
      }
    }
  }

  for (auto& [from, edges] : graph) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  // Guard feasibility per method.
  std::set<Site> feasible;
  for (const auto& ref : analyzed) {
    const Method& m = unit.methods.at(ref);
    auto rit = requirements.find(ref);
    static const std::map<std::size_t, Requirements> none;
    auto fs = feasible_sites(m, rit == requirements.end() ? none : rit->second,
                             options.path_bound);
    if (!fs) {
      result.diagnostics.push_back(
          {ref.str(), "path bound " + std::to_string(options.path_bound) +
                          " exceeded; guards ignored"});
      fs = live.at(ref);
    }
    for (auto i : *fs) {
      feasible.insert(Site{ref, i});
    }
  }

  std::sort(sources.begin(), sources.end(),
            [](const SourceSite& a, const SourceSite& b) { return a.site < b.site; });
  for (const auto& s : sources) {
    result.source_hits.push_back(
        SourceHit{s.site, s.spec->data_type, s.spec->access_kind, s.api});
  }

  for (const auto& s : sources) {
    if (!s.dst) {
      continue;
    }
    auto start = value_node(s.site.method, *s.dst);
    auto all = bfs(graph, start, options.path_bound, nullptr);
    std::optional<BfsResult> ok;
    if (feasible.count(s.site)) {
      ok = bfs(graph, start, options.path_bound, &feasible);
    }
    for (const auto& [sink_site, sink] : sinks) {
      auto goal = sink_node(sink_site);
      if (!all.dist.count(goal)) {
        continue;
      }
      TaintTrace t;
      t.sdk_id = unit.sdk_id;
      t.data_type = s.spec->data_type;
      t.source = s.site;
      t.sink = sink_site;
      t.source_api = s.api;
      t.sink_api = sink.api;
      t.channel = sink.channel;
      const BfsResult* chosen = &all;
      if (ok && ok->dist.count(goal)) {
        chosen = &*ok;
        t.feasibility = Feasibility::feasible;
      } else {
        t.feasibility = Feasibility::infeasible_guard;
      }
      t.path = path_to(*chosen, start, goal);
      t.path.insert(t.path.begin(), s.site);
      t.path_count = chosen->count.at(goal);
      result.traces.push_back(std::move(t));
    }
  }
  std::stable_sort(result.traces.begin(), result.traces.end(),
                   [](const TaintTrace& a, const TaintTrace& b) {
                     return std::tie(a.source, a.sink) < std::tie(b.source, b.sink) ||
                            (std::tie(a.source, a.sink) == std::tie(b.source, b.sink) &&
                             a.path.size() < b.path.size());
                   });
  for (std::size_t n = 0; n < result.traces.size(); ++n) {
    result.traces[n].id = unit.sdk_id + "#" + std::to_string(n + 1);
  }
  return result;
}

} // namespace sdkpriv
