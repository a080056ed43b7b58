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

#include "sdkpriv/harness.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sdkpriv/error.hpp"

namespace sdkpriv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const fs::path& path, const char* what) {
  auto text = read_file(path);
  if (!text) {
    throw CorpusError(std::string("cannot read ") + what + " '" + path.string() + "'");
  }
  try {
    return json::parse(*text);
  } catch (const json::parse_error& e) {
    throw CorpusError(std::string(what) + " '" + path.string() + "': " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw Error("cannot write '" + path.string() + "'");
  }
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

struct EntryResult {
  SdkReport report;
  std::vector<TaintTrace> traces;
  std::optional<ClaimSet> claims;
};

EntryResult run_entry(const CorpusEntry& e, const RunConfig& cfg,
                      const std::vector<Hypothesis>& hypotheses) {
  EntryResult r;
  r.report.sdk_id = e.sdk_id;
  r.report.version = e.version;
  r.report.provider = e.provider;
  r.report.category = e.category;

  ProgramUnit unit;
  try {
    unit = load_program_file(e.program.string());
  } catch (const ProgramError& err) {
    r.report.error = "program '" + e.program.filename().string() + "': " + err.what();
    return r;
  } catch (const CorpusError& err) {
    r.report.error = err.what();
    return r;
  }
  if (unit.sdk_id != e.sdk_id || unit.version != e.version) {
    r.report.warnings.push_back("program header names " + unit.sdk_id + "@" + unit.version);
  }
  // Traces and findings carry the manifest identity.
  unit.sdk_id = e.sdk_id;
  unit.version = e.version;

  if (e.policy) {
    auto text = read_file(*e.policy);
    if (!text) {
      r.report.error = "cannot read policy '" + e.policy->filename().string() + "'";
      return r;
    }
    r.claims = extract_claims(e.sdk_id, segment(*text), hypotheses, *cfg.scorer, cfg.policy,
                              &r.report.warnings);
  }

  auto analysis = analyze(unit, *cfg.catalog, cfg.analysis);
  for (const auto& d : analysis.diagnostics) {
    r.report.warnings.push_back(d.method + ": " + d.message);
  }
  std::vector<Suppression> exact, wildcard;
  for (const auto& s : cfg.suppressions) {
    if (s.sdk_id == e.sdk_id) {
      exact.push_back(s);
    } else if (s.sdk_id == "*") {
      wildcard.push_back(s);
    }
  }
  auto sup = apply_suppressions(std::move(analysis.traces), exact);
  r.report.warnings.insert(r.report.warnings.end(), sup.warnings.begin(), sup.warnings.end());
  r.traces = apply_suppressions(std::move(sup.traces), wildcard).traces;

  auto assessed = assess(unit, r.traces, analysis.source_hits, r.claims, *cfg.ontology,
                         *cfg.catalog, cfg.analysis);
  assessed.provider = e.provider;
  assessed.category = e.category;
  assessed.warnings = std::move(r.report.warnings);
  r.report = std::move(assessed);
  return r;
}

} // namespace

Manifest parse_manifest(const json& doc, const fs::path& base) {
  if (!doc.is_object() || doc.value("schema_version", 0) != 1) {
    throw CorpusError("manifest must be an object with schema_version 1");
  }
  Manifest m;
  std::set<std::string> seen;
  try {
    for (const auto& rec : doc.at("entries")) {
      CorpusEntry e;
      e.sdk_id = rec.at("sdk_id").get<std::string>();
      e.version = rec.at("version").get<std::string>();
      e.program = base / rec.at("program").get<std::string>();
      if (rec.contains("policy") && !rec.at("policy").is_null()) {
        e.policy = base / rec.at("policy").get<std::string>();
      }
      auto meta = rec.value("metadata", json::object());
      e.provider = meta.value("provider", "");
      e.category = meta.value("category", "");
      if (e.sdk_id.empty() || e.version.empty()) {
        throw CorpusError("manifest entry without sdk_id or version");
      }
      if (!seen.insert(e.key()).second) {
        throw CorpusError("manifest lists " + e.key() + " twice");
      }
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw CorpusError(std::string("manifest: ") + e.what());
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  return parse_manifest(read_json(path, "manifest"), path.parent_path());
}

CorpusRun run_corpus(const Manifest& manifest, const RunConfig& config) {
  if (!config.ontology || !config.catalog) {
    throw ConfigError("run needs an ontology and a catalog");
  }
  for (const auto& e : manifest.entries) {
    if (e.policy && !config.scorer) {
      throw ConfigError("entry " + e.key() +
                        " has a policy but no scorer URL or score fixtures were given");
    }
  }
  auto hypotheses = generate_hypotheses(*config.ontology, config.policy);

  std::vector<EntryResult> results(manifest.entries.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (auto k = next++; k < results.size(); k = next++) {
      try {
        results[k] = run_entry(manifest.entries[k], config, hypotheses);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };
  auto jobs = std::max<std::size_t>(1, std::min(config.jobs, results.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < jobs; ++k) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  CorpusRun run;
  for (auto& r : results) {
    auto key = r.report.key();
    run.traces[key] = std::move(r.traces);
    if (r.claims) {
      run.claims[key] = std::move(*r.claims);
    }
    run.report.sdks[key] = std::move(r.report);
  }
  return run;
}

double precision(const Confusion& c) {
  return c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
}

double recall(const Confusion& c) {
  return c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
}

double f1(const Confusion& c) {
  double p = precision(c), r = recall(c);
  return p + r == 0.0 || c.tp == 0 ? 0.0 : 2.0 * p * r / (p + r);
}

MetricsSummary evaluate_claims(const ClaimTable& predicted, const ClaimTable& truth) {
  std::string missing;
  for (const auto& [id, _] : predicted) {
    if (!truth.count(id)) {
      missing += " " + id + " (no ground truth)";
    }
  }
  for (const auto& [id, _] : truth) {
    if (!predicted.count(id)) {
      missing += " " + id + " (no prediction)";
    }
  }
  if (!missing.empty()) {
    throw ConfigError("prediction and ground truth disagree on ids:" + missing);
  }
  MetricsSummary m;
  for (const auto& [id, want] : truth) {
    const auto& got = predicted.at(id);
    for (const auto& t : got) {
      auto& c = m.per_type[t];
      (want.count(t) ? c.tp : c.fp) += 1;
    }
    for (const auto& t : want) {
      if (!got.count(t)) {
        m.per_type[t].fn += 1;
      }
    }
  }
  for (const auto& [_, c] : m.per_type) {
    m.total.tp += c.tp;
    m.total.fp += c.fp;
    m.total.fn += c.fn;
  }
  m.precision = precision(m.total);
  m.recall = recall(m.total);
  m.f1 = f1(m.total);
  return m;
}

ClaimTable load_claim_table(const fs::path& path) {
  auto doc = read_json(path, "claims");
  const json* table = &doc;
  if (doc.contains("claims")) {
    table = &doc.at("claims");
  }
  if (!table->is_object()) {
    throw ConfigError("'" + path.string() + "' is not a claim table");
  }
  ClaimTable out;
  try {
    for (const auto& [id, v] : table->items()) {
      const auto& list = v.is_object() ? v.at("claimed") : v;
      out[id] = list.get<std::set<DataTypeId>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
  return out;
}

json to_json(const MetricsSummary& m) {
  json per = json::object();
  for (const auto& [t, c] : m.per_type) {
    per[t] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
  }
  return {{"per_type", per},
          {"tp", m.total.tp},
          {"fp", m.total.fp},
          {"fn", m.total.fn},
          {"precision", pct(m.precision)},
          {"recall", pct(m.recall)},
          {"f1", pct(m.f1)}};
}

std::string format_metrics(const MetricsSummary& m) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %5s %5s %5s\n", "data type", "TP", "FP", "FN");
  out += line;
  for (const auto& [t, c] : m.per_type) {
    std::snprintf(line, sizeof line, "%-24s %5zu %5zu %5zu\n", t.c_str(), c.tp, c.fp, c.fn);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-24s %5zu %5zu %5zu\n", "total", m.total.tp, m.total.fp,
                m.total.fn);
  out += line;
  out += "precision " + pct(m.precision) + "  recall " + pct(m.recall) + "  F1 " + pct(m.f1) +
         "\n";
  return out;
}

LabeledCorpus load_labeled_corpus(const fs::path& path) {
  auto doc = read_json(path, "labeled corpus");
  if (doc.value("schema_version", 0) != 1) {
    throw CorpusError("labeled corpus must have schema_version 1");
  }
  LabeledCorpus c;
  try {
    for (const auto& rec : doc.at("policies")) {
      auto file = path.parent_path() / rec.at("policy").get<std::string>();
      auto text = read_file(file);
      if (!text) {
        throw CorpusError("cannot read policy '" + file.string() + "'");
      }
      c.policies.push_back({rec.at("sdk_id").get<std::string>(), *text,
                            rec.at("truth").get<std::set<DataTypeId>>()});
    }
  } catch (const json::exception& e) {
    throw CorpusError(std::string("labeled corpus: ") + e.what());
  }
  return c;
}

std::string format_report_table(const ComplianceReport& report) {
  std::string out;
  char line[256];
  out += "# " + std::string(kConsentNote) + "\n";
  std::snprintf(line, sizeof line, "%-28s %-10s %6s %6s %6s %6s %6s  %s\n", "sdk", "policy",
                "traces", "leak", "excess", "over", "inject", "error");
  out += line;
  for (const auto& [key, s] : report.sdks) {
    std::map<FindingKind, int> n;
    for (const auto& f : s.findings) {
      ++n[f.kind];
    }
    std::size_t traces = 0;
    for (const auto& [_, c] : s.trace_counts) {
      traces += c;
    }
    std::snprintf(line, sizeof line, "%-28s %-10s %6zu %6d %6d %6d %6d  %s\n", key.c_str(),
                  s.has_policy ? "yes" : "no", traces, n[FindingKind::type1_leak],
                  n[FindingKind::type2_excessive], n[FindingKind::type3_overclaim],
                  n[FindingKind::settings_injection], s.error.value_or("").c_str());
    out += line;
  }
  auto a = report.aggregates();
  out += "\nsdks " + std::to_string(a.sdks) + ", with policy " +
         std::to_string(a.sdks_with_policy) + ", failed " + std::to_string(a.sdks_failed) + "\n";
  out += "excessive " + std::to_string(a.sdks_excessive) + "/" +
         std::to_string(a.sdks_with_policy) + " (" +
         percent1(a.sdks_excessive, a.sdks_with_policy) + "), over-claiming " +
         std::to_string(a.sdks_overclaiming) + "/" + std::to_string(a.sdks_with_policy) + " (" +
         percent1(a.sdks_overclaiming, a.sdks_with_policy) + ")\n";
  std::size_t feasible = 0;
  for (const auto& [_, c] : a.channel_counts) {
    feasible += c;
  }
  for (const auto& [ch, c] : a.channel_counts) {
    out += "channel " + ch + ": " + std::to_string(c) + "/" + std::to_string(feasible) + " (" +
           percent1(c, feasible) + ")\n";
  }
  for (const auto& [f, c] : a.feasibility_counts) {
    out += "traces " + f + ": " + std::to_string(c) + "\n";
  }
  return out;
}

std::string format_tuning(const TuningResult& r) {
  std::string out;
  char line[128];
  for (const auto& p : r.sweep) {
    std::snprintf(line, sizeof line, "T=%.2f tp=%zu fp=%zu fn=%zu f1=%.4f\n", p.threshold, p.tp,
                  p.fp, p.fn, p.f1);
    out += line;
  }
  std::snprintf(line, sizeof line, "threshold %.2f\n", r.threshold);
  return out + line;
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

json traces_document(const CorpusRun& run) {
  json all = json::object();
  for (const auto& [key, list] : run.traces) {
    json arr = json::array();
    for (const auto& t : list) {
      arr.push_back(to_json(t));
    }
    all[key] = std::move(arr);
  }
  return {{"schema_version", 1}, {"traces", std::move(all)}};
}

json claims_document(const CorpusRun& run) {
  json all = json::object();
  for (const auto& [key, cs] : run.claims) {
    all[key] = to_json(cs);
  }
  return {{"schema_version", 1}, {"claims", std::move(all)}};
}

void emit_report(const CorpusRun& run, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create '" + dir.string() + "': " + ec.message());
  }
  write_file(dir / "report.json", dump_canonical(to_json(run.report)));
  write_file(dir / "report.txt", format_report_table(run.report));
  write_file(dir / "traces.json", dump_canonical(traces_document(run)));
  write_file(dir / "claims.json", dump_canonical(claims_document(run)));
}

} // namespace sdkpriv
