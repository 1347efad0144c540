// Copyright 2026 The SheetSentry Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sheetsentry/report.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "sheetsentry/depgraph.h"
#include "sheetsentry/errors.h"
#include "sheetsentry/evaluator.h"
#include "sheetsentry/formula.h"
#include "sheetsentry/normalizer.h"

namespace sheetsentry {

using json = nlohmann::json;

double round_sig15(double v) {
  if (!std::isfinite(v) || v == 0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

namespace {

void RoundJson(json& j) {
  if (j.is_number_float()) {
    j = round_sig15(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) RoundJson(child);
  }
}

CellValue RoundValue(CellValue v) {
  if (auto* d = std::get_if<double>(&v)) *d = round_sig15(*d);
  return v;
}

void RoundConfig(RuleConfig& cfg) {
  cfg.script_min_comment_ratio = round_sig15(cfg.script_min_comment_ratio);
  cfg.script_min_indent_ratio = round_sig15(cfg.script_min_indent_ratio);
  for (double& d : cfg.const_whitelist) d = round_sig15(d);
}

}  // namespace

AuditReport audit_workbook(const Workbook& wb, std::string workbook_path,
                           const RuleConfig& cfg, double p) {
  const std::vector<ParsedFormula> formulas = parse_all(wb);
  const std::vector<CopyClass> classes = copy_classes(formulas);
  const DepGraph graph = build_graph(wb, formulas);
  const Recomputation recomputed = recompute(wb, formulas, graph);
  const StalenessReport staleness = staleness_report(wb, recomputed);
  const std::vector<ScriptMetrics> scripts = script_metrics(wb.scripts);

  AuditReport report;
  report.workbook_path = std::move(workbook_path);
  report.p = round_sig15(p);
  report.config = cfg;
  RoundConfig(report.config);
  report.metrics = compute_metrics(wb, formulas, classes, graph, p);
  report.metrics.p = round_sig15(report.metrics.p);
  report.metrics.error_probability = round_sig15(report.metrics.error_probability);

  const AnalysisContext ctx{wb, formulas, classes, graph, staleness, scripts};
  report.findings = run_rules(ctx, cfg);
  for (Finding& f : report.findings) RoundJson(f.evidence);

  for (const StaleEntry& e : staleness.entries) {
    std::optional<double> delta;
    if (e.relative_delta) delta = round_sig15(*e.relative_delta);
    report.staleness.entries.push_back(StaleRecord{
        wb.address_of(e.cell), RoundValue(e.cached), RoundValue(e.recomputed), delta});
  }
  for (const CellKey& k : staleness.external_excluded) {
    report.staleness.external_excluded.push_back(wb.address_of(k));
  }
  for (const ExternalLink& link : graph.external_links()) {
    report.external_links.push_back(ExternalLinkRecord{
        wb.address_of(link.source), link.workbook, link.sheet, link.target});
  }
  return report;
}

AuditReport audit_file(const std::filesystem::path& path, const RuleConfig& cfg,
                       double p) {
  const Workbook wb = load_workbook(path);
  return audit_workbook(wb, path.string(), cfg, p);
}

namespace {

json AddressList(const std::vector<CellAddress>& cells) {
  json out = json::array();
  for (const CellAddress& a : cells) out.push_back(to_string(a));
  return out;
}

CellAddress AddressFrom(const json& j, const std::string& path) {
  if (!j.is_string()) throw FormatError(path, "expected a cell address");
  const std::string text = j.get<std::string>();
  const std::size_t bang = text.rfind('!');
  if (bang == std::string::npos || bang == 0) {
    throw FormatError(path, "expected Sheet!A1, got '" + text + "'");
  }
  try {
    const AddressParts parts = parse_address(std::string_view(text).substr(bang + 1));
    return CellAddress{text.substr(0, bang), parts.col, parts.row};
  } catch (const AddressParseError&) {
    throw FormatError(path, "bad cell address '" + text + "'");
  }
}

std::vector<CellAddress> AddressListFrom(const json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path, "expected an array");
  std::vector<CellAddress> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(AddressFrom(j[i], path + "/" + std::to_string(i)));
  }
  return out;
}

const json& Field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(path + "/" + key, "missing field");
  }
  return obj.at(key);
}

template <typename T>
T Get(const json& obj, const char* key, const std::string& path) {
  try {
    return Field(obj, key, path).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(path + "/" + key, e.what());
  }
}

CellValue ValueFrom(const json& j, const std::string& path) {
  try {
    return value_from_json(j);
  } catch (const FormatError& e) {
    throw FormatError(path, e.detail());
  }
}

}  // namespace

json metrics_to_json(const WorkbookMetrics& m) {
  return json{{"formula_cells", m.formula_cells},
              {"value_cells", m.value_cells},
              {"unique_formulae", m.unique_formulae},
              {"p", round_sig15(m.p)},
              {"error_probability", round_sig15(m.error_probability)},
              {"error_probability_pct", m.error_probability_pct},
              {"max_branching", m.max_branching},
              {"external_link_count", m.external_link_count},
              {"script_modules", m.script_modules},
              {"script_lines_total", m.script_lines_total},
              {"cost_estimate", m.cost_estimate}};
}

WorkbookMetrics metrics_from_json(const json& j) {
  const std::string path = "/metrics";
  WorkbookMetrics m;
  m.formula_cells = Get<std::size_t>(j, "formula_cells", path);
  m.value_cells = Get<std::size_t>(j, "value_cells", path);
  m.unique_formulae = Get<std::size_t>(j, "unique_formulae", path);
  m.p = Get<double>(j, "p", path);
  m.error_probability = Get<double>(j, "error_probability", path);
  m.error_probability_pct = Get<int>(j, "error_probability_pct", path);
  m.max_branching = Get<std::size_t>(j, "max_branching", path);
  m.external_link_count = Get<std::size_t>(j, "external_link_count", path);
  m.script_modules = Get<std::size_t>(j, "script_modules", path);
  m.script_lines_total = Get<std::size_t>(j, "script_lines_total", path);
  m.cost_estimate = Get<std::uint64_t>(j, "cost_estimate", path);
  return m;
}

json report_to_json(const AuditReport& r) {
  json findings = json::array();
  for (const Finding& f : r.findings) {
    json evidence = f.evidence;
    RoundJson(evidence);
    findings.push_back(json{{"rule_id", f.rule_id},
                            {"severity", std::string(severity_name(f.severity))},
                            {"category", std::string(category_name(f.category))},
                            {"locations", AddressList(f.locations)},
                            {"message", f.message},
                            {"evidence", std::move(evidence)}});
  }
  json stale = json::array();
  for (const StaleRecord& e : r.staleness.entries) {
    json cached = value_to_json(RoundValue(e.cached));
    json recomputed = value_to_json(RoundValue(e.recomputed));
    stale.push_back(json{{"cell", to_string(e.cell)},
                         {"cached", std::move(cached)},
                         {"recomputed", std::move(recomputed)},
                         {"relative_delta", e.relative_delta
                                                ? json(round_sig15(*e.relative_delta))
                                                : json(nullptr)}});
  }
  json links = json::array();
  for (const ExternalLinkRecord& l : r.external_links) {
    links.push_back(json{{"source", to_string(l.source)},
                         {"workbook", l.workbook},
                         {"sheet", l.sheet},
                         {"target", l.target}});
  }
  json config = rule_config_to_json(r.config);
  RoundJson(config);
  config["p"] = round_sig15(r.p);
  return json{{"tool", json{{"name", std::string(kToolName)}, {"version", r.tool_version}}},
              {"workbook", r.workbook_path},
              {"config", std::move(config)},
              {"metrics", metrics_to_json(r.metrics)},
              {"findings", std::move(findings)},
              {"staleness", json{{"entries", std::move(stale)},
                                 {"external_excluded",
                                  AddressList(r.staleness.external_excluded)}}},
              {"external_links", std::move(links)}};
}

std::string render_json(const AuditReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

AuditReport parse_report(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("", "expected an object");
  AuditReport r;
  r.tool_version = Get<std::string>(Field(j, "tool", ""), "version", "/tool");
  r.workbook_path = Get<std::string>(j, "workbook", "");

  json config = Field(j, "config", "");
  if (!config.is_object()) throw FormatError("/config", "expected an object");
  r.p = Get<double>(config, "p", "/config");
  config.erase("p");
  try {
    r.config = rule_config_from_json(config);
  } catch (const FormatError& e) {
    throw FormatError("/config" + e.json_path(), e.detail());
  }
  r.metrics = metrics_from_json(Field(j, "metrics", ""));

  const json& findings = Field(j, "findings", "");
  if (!findings.is_array()) throw FormatError("/findings", "expected an array");
  for (std::size_t i = 0; i < findings.size(); ++i) {
    const std::string path = "/findings/" + std::to_string(i);
    const json& fj = findings[i];
    Finding f;
    f.rule_id = Get<std::string>(fj, "rule_id", path);
    if (find_rule(f.rule_id) == nullptr) {
      throw FormatError(path + "/rule_id", "unknown rule id '" + f.rule_id + "'");
    }
    const auto severity = parse_severity(Get<std::string>(fj, "severity", path));
    if (!severity) throw FormatError(path + "/severity", "unknown severity");
    f.severity = *severity;
    const auto category = parse_category(Get<std::string>(fj, "category", path));
    if (!category) throw FormatError(path + "/category", "unknown category");
    f.category = *category;
    f.locations = AddressListFrom(Field(fj, "locations", path), path + "/locations");
    f.message = Get<std::string>(fj, "message", path);
    f.evidence = Field(fj, "evidence", path);
    r.findings.push_back(std::move(f));
  }

  const json& staleness = Field(j, "staleness", "");
  const json& entries = Field(staleness, "entries", "/staleness");
  if (!entries.is_array()) throw FormatError("/staleness/entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = "/staleness/entries/" + std::to_string(i);
    const json& ej = entries[i];
    StaleRecord e;
    e.cell = AddressFrom(Field(ej, "cell", path), path + "/cell");
    e.cached = ValueFrom(Field(ej, "cached", path), path + "/cached");
    e.recomputed = ValueFrom(Field(ej, "recomputed", path), path + "/recomputed");
    const json& delta = Field(ej, "relative_delta", path);
    if (!delta.is_null()) e.relative_delta = Get<double>(ej, "relative_delta", path);
    r.staleness.entries.push_back(std::move(e));
  }
  r.staleness.external_excluded =
      AddressListFrom(Field(staleness, "external_excluded", "/staleness"),
                      "/staleness/external_excluded");

  const json& links = Field(j, "external_links", "");
  if (!links.is_array()) throw FormatError("/external_links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string path = "/external_links/" + std::to_string(i);
    const json& lj = links[i];
    r.external_links.push_back(ExternalLinkRecord{
        AddressFrom(Field(lj, "source", path), path + "/source"),
        Get<std::string>(lj, "workbook", path), Get<std::string>(lj, "sheet", path),
        Get<std::string>(lj, "target", path)});
  }
  return r;
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void MetricsTable(std::ostringstream& out, const WorkbookMetrics& m) {
  char line[160];
  std::snprintf(line, sizeof line, "%-15s %-17s %s\n", "Formula cells", "Unique formulae",
                "Error probability");
  out << line;
  std::snprintf(line, sizeof line, "%-15zu %-17zu %d%%\n", m.formula_cells,
                m.unique_formulae, m.error_probability_pct);
  out << line << "\n";
  out << "  per-formula error rate p   " << format_number(m.p) << "\n";
  out << "  error probability          " << Fixed(m.error_probability, 6) << "\n";
  out << "  value cells                " << m.value_cells << "\n";
  out << "  max conditional branches   " << m.max_branching << "\n";
  out << "  external link references   " << m.external_link_count << "\n";
  out << "  script modules / lines     " << m.script_modules << " / "
      << m.script_lines_total << "\n";
  out << "  recalculation cost units   " << m.cost_estimate << "\n";
}

std::string LocationText(const std::vector<CellAddress>& locations) {
  if (locations.empty()) return "(workbook)";
  constexpr std::size_t kShown = 8;
  std::string out;
  for (std::size_t i = 0; i < locations.size() && i < kShown; ++i) {
    if (i) out += ", ";
    out += to_string(locations[i]);
  }
  if (locations.size() > kShown) {
    out += " and " + std::to_string(locations.size() - kShown) + " more";
  }
  return out;
}

}  // namespace

std::string render_text(const AuditReport& r) {
  std::ostringstream out;
  out << "SheetSentry " << r.tool_version << " audit of " << r.workbook_path << "\n\n";
  MetricsTable(out, r.metrics);
  out << "  stale cells                " << r.staleness.entries.size();
  if (!r.staleness.external_excluded.empty()) {
    out << " (" << r.staleness.external_excluded.size()
        << " unverifiable through external links)";
  }
  out << "\n\n";
  if (r.findings.empty()) {
    out << "No findings.\n";
    return out.str();
  }
  out << "Findings: " << r.findings.size() << "\n";
  for (Category c : kCategoryOrder) {
    bool header = false;
    for (const Finding& f : r.findings) {
      if (f.category != c) continue;
      if (!header) {
        out << "\n[" << category_name(c) << "]\n";
        header = true;
      }
      out << "  " << f.rule_id << " (" << severity_name(f.severity) << ") "
          << LocationText(f.locations) << "\n";
      out << "    " << f.message << "\n";
    }
  }
  return out.str();
}

std::string render_metrics_json(const std::string& workbook_path,
                                const WorkbookMetrics& m) {
  return json{{"workbook", workbook_path}, {"metrics", metrics_to_json(m)}}.dump(2) + "\n";
}

std::string render_metrics_text(const std::string& workbook_path,
                                const WorkbookMetrics& m) {
  std::ostringstream out;
  out << "Metrics for " << workbook_path << "\n\n";
  MetricsTable(out, m);
  return out.str();
}

std::string render_explain(const RuleInfo& rule, const RuleConfig& cfg) {
  std::ostringstream out;
  out << rule.id << "  " << category_name(rule.category) << " / "
      << severity_name(rule.severity) << "\n\n";
  out << rule.summary << "\n\n" << rule.rationale << "\n";
  if (!rule.thresholds.empty()) {
    const json defaults = rule_config_to_json(RuleConfig());
    const json active = rule_config_to_json(cfg);
    out << "\nThresholds:\n";
    for (std::string_view key : rule.thresholds) {
      const std::string k(key);
      out << "  " << k << " = " << active.at(k).dump();
      if (active.at(k) != defaults.at(k)) out << " (default " << defaults.at(k).dump() << ")";
      out << "\n";
    }
  }
  if (!cfg.is_enabled(rule.id)) out << "\nDisabled in the active configuration.\n";
  return out.str();
}

ExitCode exit_code_for(const std::vector<Finding>& findings, Severity fail_on) {
  for (const Finding& f : findings) {
    if (f.severity >= fail_on) return ExitCode::kFindings;
  }
  return ExitCode::kClean;
}

}  // namespace sheetsentry
