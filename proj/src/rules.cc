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

#include "sheetsentry/rules.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "sheetsentry/errors.h"

namespace sheetsentry {

using json = nlohmann::json;

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::kInfo: return "info";
    case Severity::kWarning: return "warning";
    case Severity::kError: return "error";
  }
  return "info";
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (Severity s : {Severity::kInfo, Severity::kWarning, Severity::kError}) {
    if (severity_name(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kSpecification: return "specification";
    case Category::kCorrectness: return "correctness";
    case Category::kAuditability: return "auditability";
    case Category::kUsability: return "usability";
    case Category::kMaintainability: return "maintainability";
    case Category::kPerformance: return "performance";
  }
  return "correctness";
}

std::optional<Category> parse_category(std::string_view text) {
  for (Category c : kCategoryOrder) {
    if (category_name(c) == text) return c;
  }
  return std::nullopt;
}

const std::vector<RuleInfo>& rule_registry() {
  static const std::vector<RuleInfo> kRules = {
      {"COPY_CLASS_HOLE", Category::kUsability, Severity::kError,
       "A literal value interrupts a run of copied formulas.",
       "A number sitting where every neighbour holds the same copied formula "
       "is the usual trace of a formula overwritten by hand. The cell no "
       "longer responds to its inputs.",
       {"min_copy_class_for_hole"}},
      {"DEEP_NESTING", Category::kMaintainability, Severity::kWarning,
       "Formula has too many conditional branches.",
       "Every IF adds a path a reader has to trace. Deeply nested "
       "conditionals are hard to review and easy to break when edited.",
       {"max_branches"}},
      {"EXTERNAL_LINK", Category::kAuditability, Severity::kWarning,
       "Formula reads data from another workbook.",
       "Values imported from another file cannot be checked from this one. "
       "Whoever audits the results also needs the source workbook and the "
       "settings it was run with.",
       {}},
      {"HARDCODED_CONSTANT", Category::kMaintainability, Severity::kWarning,
       "The same numeric constant is typed into several distinct formulas.",
       "A parameter repeated across formulas has to be found and changed in "
       "every one of them. Missing a copy leaves the workbook silently "
       "inconsistent.",
       {"const_min_repeats", "const_whitelist"}},
      {"LONG_FORMULA", Category::kMaintainability, Severity::kInfo,
       "Formula is longer than the token limit.",
       "Long formulas are difficult to read and to verify by hand; splitting "
       "them into named intermediate cells makes each step checkable.",
       {"max_formula_tokens"}},
      {"LOOKUP_HOTSPOT", Category::kPerformance, Severity::kWarning,
       "Expensive formula dominated by a linear lookup.",
       "Each exact-match lookup scans its table. Repeated over many cells the "
       "scans dominate recalculation time, and slow workbooks get tested "
       "less.",
       {"lookup_cost_threshold"}},
      {"MANUAL_CALC", Category::kPerformance, Severity::kWarning,
       "Workbook is set to manual recalculation.",
       "With manual calculation the displayed results need not reflect the "
       "current inputs, and the setting carries over to other workbooks open "
       "in the same session.",
       {}},
      {"SCRIPT_QUALITY", Category::kMaintainability, Severity::kWarning,
       "Large macro module is undocumented or unindented.",
       "Long stretches of uncommented, unindented macro code are unlikely to "
       "be right initially and even less likely to stay right after edits.",
       {"script_min_lines", "script_min_comment_ratio", "script_min_indent_ratio"}},
      {"SPEC_MISSING", Category::kSpecification, Severity::kWarning,
       "Workbook has no specification.",
       "Without a statement of what the workbook is meant to compute there is "
       "nothing to check its formulas against.",
       {}},
      {"STALE_VALUE", Category::kCorrectness, Severity::kError,
       "Stored value differs from the recomputed value.",
       "The saved result does not follow from the saved inputs. Typical "
       "causes are a skipped manual recalculation or a pasted value.",
       {}},
      {"UNRECORDED_ASSUMPTION", Category::kSpecification, Severity::kInfo,
       "External data source is not recorded in the manifest assumptions.",
       "When imported data has no recorded provenance nobody can later tell "
       "which assumptions produced it.",
       {}},
  };
  return kRules;
}

const RuleInfo* find_rule(std::string_view id) {
  for (const RuleInfo& r : rule_registry()) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

RuleConfig::RuleConfig() {
  for (const RuleInfo& r : rule_registry()) enabled.insert(std::string(r.id));
}

namespace {

std::int64_t PositiveInt(const json& j, const std::string& key) {
  const std::string path = "/" + key;
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw FormatError(path, "expected an integer");
  }
  const std::int64_t v = j.get<std::int64_t>();
  if (v <= 0) throw FormatError(path, "threshold must be positive");
  return v;
}

double PositiveRatio(const json& j, const std::string& key) {
  const std::string path = "/" + key;
  if (!j.is_number()) throw FormatError(path, "expected a number");
  const double v = j.get<double>();
  if (!(v > 0 && v <= 1)) throw FormatError(path, "ratio must lie in (0, 1]");
  return v;
}

}  // namespace

RuleConfig rule_config_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("", "expected an object");
  RuleConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "enabled") {
      if (!v.is_array()) throw FormatError("/enabled", "expected an array");
      cfg.enabled.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string path = "/enabled/" + std::to_string(i);
        if (!v[i].is_string()) throw FormatError(path, "expected a rule id");
        const std::string id = v[i].get<std::string>();
        if (find_rule(id) == nullptr) {
          throw FormatError(path, "unknown rule id '" + id + "'");
        }
        cfg.enabled.insert(id);
      }
    } else if (key == "const_whitelist") {
      if (!v.is_array()) throw FormatError("/const_whitelist", "expected an array");
      cfg.const_whitelist.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
          throw FormatError("/const_whitelist/" + std::to_string(i),
                            "expected a number");
        }
        cfg.const_whitelist.push_back(v[i].get<double>());
      }
    } else if (key == "const_min_repeats") {
      cfg.const_min_repeats = PositiveInt(v, key);
    } else if (key == "max_branches") {
      cfg.max_branches = PositiveInt(v, key);
    } else if (key == "max_formula_tokens") {
      cfg.max_formula_tokens = PositiveInt(v, key);
    } else if (key == "min_copy_class_for_hole") {
      cfg.min_copy_class_for_hole = PositiveInt(v, key);
    } else if (key == "lookup_cost_threshold") {
      cfg.lookup_cost_threshold = PositiveInt(v, key);
    } else if (key == "script_min_lines") {
      cfg.script_min_lines = PositiveInt(v, key);
    } else if (key == "script_min_comment_ratio") {
      cfg.script_min_comment_ratio = PositiveRatio(v, key);
    } else if (key == "script_min_indent_ratio") {
      cfg.script_min_indent_ratio = PositiveRatio(v, key);
    } else {
      throw FormatError("/" + key, "unknown configuration key");
    }
  }
  return cfg;
}

RuleConfig parse_rule_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what());
  }
  return rule_config_from_json(j);
}

json rule_config_to_json(const RuleConfig& cfg) {
  json j = json::object();
  j["enabled"] = json(std::vector<std::string>(cfg.enabled.begin(), cfg.enabled.end()));
  j["const_min_repeats"] = cfg.const_min_repeats;
  j["const_whitelist"] = cfg.const_whitelist;
  j["max_branches"] = cfg.max_branches;
  j["max_formula_tokens"] = cfg.max_formula_tokens;
  j["min_copy_class_for_hole"] = cfg.min_copy_class_for_hole;
  j["lookup_cost_threshold"] = cfg.lookup_cost_threshold;
  j["script_min_lines"] = cfg.script_min_lines;
  j["script_min_comment_ratio"] = cfg.script_min_comment_ratio;
  j["script_min_indent_ratio"] = cfg.script_min_indent_ratio;
  return j;
}

json value_to_json(const CellValue& v) {
  struct Visitor {
    json operator()(Blank) const { return nullptr; }
    json operator()(double d) const { return d; }
    json operator()(const std::string& s) const { return s; }
    json operator()(bool b) const { return b; }
    json operator()(ErrorCode e) const {
      return json{{"err", std::string(error_code_text(e))}};
    }
  };
  return std::visit(Visitor{}, v);
}

CellValue value_from_json(const json& j) {
  if (j.is_null()) return Blank{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object() && j.contains("err") && j["err"].is_string()) {
    if (auto code = parse_error_code(j["err"].get<std::string>())) return *code;
  }
  throw FormatError("", "not a cell value: " + j.dump());
}

namespace {

Finding MakeFinding(std::string_view id, std::vector<CellAddress> locations,
                    std::string message, json evidence) {
  const RuleInfo* info = find_rule(id);
  return Finding{std::string(id), info->severity, info->category,
                 std::move(locations), std::move(message), std::move(evidence)};
}

const ParsedFormula& FormulaAt(std::span<const ParsedFormula> formulas,
                               const CellKey& key) {
  auto it = std::lower_bound(
      formulas.begin(), formulas.end(), key,
      [](const ParsedFormula& pf, const CellKey& k) { return pf.cell < k; });
  return *it;
}

void CollectLiterals(const FormulaAst& node, std::set<double>& out) {
  if (const auto* n = node.as<NumberLit>()) {
    out.insert(n->value);
    return;
  }
  if (const auto* u = node.as<Unary>()) {
    if (const auto* n = u->operand->as<NumberLit>()) {
      out.insert(u->op == UnaryOp::kNeg ? -n->value : n->value);
      return;
    }
    CollectLiterals(*u->operand, out);
  } else if (const auto* b = node.as<Binary>()) {
    CollectLiterals(*b->left, out);
    CollectLiterals(*b->right, out);
  } else if (const auto* c = node.as<Call>()) {
    for (const FormulaAst& arg : c->args) CollectLiterals(arg, out);
  }
}

std::string Plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

}  // namespace

std::vector<Finding> check_spec_presence(const Manifest& manifest) {
  const bool missing =
      !manifest.specification ||
      manifest.specification->find_first_not_of(" \t\r\n") == std::string::npos;
  if (!missing) return {};
  return {MakeFinding("SPEC_MISSING", {},
                      "Workbook manifest has no specification of what it is "
                      "meant to compute.",
                      json::object())};
}

std::vector<Finding> check_calc_mode(const WorkbookSettings& settings) {
  if (settings.calc_mode != CalcMode::kManual) return {};
  return {MakeFinding("MANUAL_CALC", {},
                      "Calculation mode is manual; stored results may not "
                      "reflect the current inputs.",
                      json{{"calc_mode", "manual"}})};
}

std::vector<Finding> check_external_links(const Workbook& wb, const DepGraph& g) {
  // Group by workbook name, case-insensitively, keeping first spelling.
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::string, std::set<CellKey>>> groups;
  std::map<std::string, std::size_t> refs;
  for (const ExternalLink& link : g.external_links()) {
    const std::string key = to_upper(link.workbook);
    auto [it, inserted] = groups.try_emplace(key, link.workbook, std::set<CellKey>{});
    if (inserted) order.push_back(key);
    it->second.second.insert(link.source);
    ++refs[key];
  }
  std::vector<Finding> out;
  for (const std::string& key : order) {
    const auto& [name, cells] = groups[key];
    std::vector<CellAddress> locations;
    for (const CellKey& c : cells) locations.push_back(wb.address_of(c));
    out.push_back(MakeFinding(
        "EXTERNAL_LINK", locations,
        Plural(cells.size(), "cell") + " read data from external workbook [" +
            name + "]; the imported values cannot be checked from this file.",
        json{{"workbook", name},
             {"cells", cells.size()},
             {"references", refs[key]}}));
    bool recorded = false;
    for (const auto& [akey, avalue] : wb.manifest.assumptions) {
      if (iequals(akey, name) ||
          to_upper(avalue).find(to_upper(name)) != std::string::npos) {
        recorded = true;
        break;
      }
    }
    if (!recorded) {
      out.push_back(MakeFinding(
          "UNRECORDED_ASSUMPTION", {},
          "Manifest assumptions do not record the provenance of data imported "
          "from [" + name + "].",
          json{{"workbook", name}}));
    }
  }
  return out;
}

std::vector<Finding> check_stale_values(const Workbook& wb,
                                        const StalenessReport& staleness) {
  std::vector<Finding> out;
  for (const StaleEntry& e : staleness.entries) {
    json evidence{{"cached", value_to_json(e.cached)},
                  {"recomputed", value_to_json(e.recomputed)},
                  {"relative_delta", e.relative_delta ? json(*e.relative_delta)
                                                      : json(nullptr)}};
    out.push_back(MakeFinding(
        "STALE_VALUE", {wb.address_of(e.cell)},
        "Stored value " + display_value(e.cached) +
            " differs from recomputed value " + display_value(e.recomputed) + ".",
        std::move(evidence)));
  }
  return out;
}

std::vector<Finding> check_hardcoded_constant(const Workbook& wb,
                                              std::span<const ParsedFormula> formulas,
                                              std::span<const CopyClass> classes,
                                              const RuleConfig& cfg) {
  std::map<double, std::vector<CellKey>> uses;
  for (const CopyClass& c : classes) {
    std::set<double> literals;
    CollectLiterals(FormulaAt(formulas, c.representative()).ast, literals);
    for (double v : literals) uses[v].push_back(c.representative());
  }
  std::vector<Finding> out;
  for (const auto& [value, reps] : uses) {
    if (std::find(cfg.const_whitelist.begin(), cfg.const_whitelist.end(), value) !=
        cfg.const_whitelist.end()) {
      continue;
    }
    if (static_cast<std::int64_t>(reps.size()) < cfg.const_min_repeats) continue;
    std::vector<CellAddress> locations;
    for (const CellKey& k : reps) locations.push_back(wb.address_of(k));
    out.push_back(MakeFinding(
        "HARDCODED_CONSTANT", std::move(locations),
        "Constant " + format_number(value) + " is hard-coded in " +
            std::to_string(reps.size()) +
            " distinct formulas; keep it in one labelled input cell.",
        json{{"constant", value}, {"count", reps.size()}}));
  }
  return out;
}

std::vector<Finding> check_deep_nesting(const Workbook& wb,
                                        std::span<const ParsedFormula> formulas,
                                        std::span<const CopyClass> classes,
                                        const RuleConfig& cfg) {
  std::vector<Finding> out;
  for (const CopyClass& c : classes) {
    const std::size_t branches = branch_count(FormulaAt(formulas, c.representative()).ast);
    if (static_cast<std::int64_t>(branches) <= cfg.max_branches) continue;
    out.push_back(MakeFinding(
        "DEEP_NESTING", {wb.address_of(c.representative())},
        "Formula has " + std::to_string(branches) + " conditional branches (limit " +
            std::to_string(cfg.max_branches) + "), copied to " +
            Plural(c.members.size(), "cell") + ".",
        json{{"branches", branches},
             {"copies", c.members.size()},
             {"normalized", c.normalized.text}}));
  }
  return out;
}

std::vector<Finding> check_long_formula(const Workbook& wb,
                                        std::span<const ParsedFormula> formulas,
                                        std::span<const CopyClass> classes,
                                        const RuleConfig& cfg) {
  std::vector<Finding> out;
  for (const CopyClass& c : classes) {
    const std::size_t tokens = FormulaAt(formulas, c.representative()).token_count;
    if (static_cast<std::int64_t>(tokens) <= cfg.max_formula_tokens) continue;
    out.push_back(MakeFinding(
        "LONG_FORMULA", {wb.address_of(c.representative())},
        "Formula is " + std::to_string(tokens) + " tokens long (limit " +
            std::to_string(cfg.max_formula_tokens) + ").",
        json{{"tokens", tokens},
             {"copies", c.members.size()},
             {"normalized", c.normalized.text}}));
  }
  return out;
}

std::vector<Finding> check_copy_class_holes(const Workbook& wb,
                                            std::span<const CopyClass> classes,
                                            const RuleConfig& cfg) {
  std::vector<Finding> out;
  for (const CopyClass& c : classes) {
    if (static_cast<std::int64_t>(c.members.size()) < cfg.min_copy_class_for_hole) {
      continue;
    }
    // Members grouped by line: (sheet, column) runs and (sheet, row) runs.
    std::map<std::pair<int, int>, std::vector<int>> by_col;
    std::map<std::pair<int, int>, std::vector<int>> by_row;
    for (const CellKey& k : c.members) {
      by_col[{k.sheet, k.col}].push_back(k.row);
      by_row[{k.sheet, k.row}].push_back(k.col);
    }
    std::set<CellKey> holes;
    auto scan = [&](const auto& lines, bool column_run) {
      for (const auto& [line, positions] : lines) {
        if (static_cast<std::int64_t>(positions.size()) < cfg.min_copy_class_for_hole) {
          continue;
        }
        const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
        const std::set<int> members(positions.begin(), positions.end());
        for (int p = *lo + 1; p < *hi; ++p) {
          if (members.count(p)) continue;
          const CellKey k = column_run ? CellKey{line.first, p, line.second}
                                       : CellKey{line.first, line.second, p};
          const Cell* cell = wb.cell(k);
          if (cell != nullptr && !cell->has_formula()) holes.insert(k);
        }
      }
    };
    scan(by_col, true);
    scan(by_row, false);
    for (const CellKey& k : holes) {
      const Cell* cell = wb.cell(k);
      out.push_back(MakeFinding(
          "COPY_CLASS_HOLE", {wb.address_of(k)},
          "Literal value " + display_value(cell->cached) +
              " interrupts a run of " + std::to_string(c.members.size()) +
              " copied formulas; it may have overwritten a formula.",
          json{{"normalized", c.normalized.text},
               {"class_size", c.members.size()},
               {"value", value_to_json(cell->cached)}}));
    }
  }
  return out;
}

std::vector<Finding> check_lookup_hotspots(const Workbook& wb,
                                           std::span<const ParsedFormula> formulas,
                                           std::span<const CopyClass> classes,
                                           const RuleConfig& cfg) {
  std::vector<Finding> out;
  for (const CopyClass& c : classes) {
    const FormulaAst& ast = FormulaAt(formulas, c.representative()).ast;
    const std::size_t lookups = vlookup_count(ast);
    if (lookups == 0) continue;
    const std::uint64_t cost = formula_cost(ast);
    if (cost <= static_cast<std::uint64_t>(cfg.lookup_cost_threshold)) continue;
    out.push_back(MakeFinding(
        "LOOKUP_HOTSPOT", {wb.address_of(c.representative())},
        "Formula costs " + std::to_string(cost) + " units per recalculation (limit " +
            std::to_string(cfg.lookup_cost_threshold) + ") with " +
            Plural(lookups, "lookup") + ", copied to " +
            Plural(c.members.size(), "cell") + ".",
        json{{"cost", cost}, {"lookups", lookups}, {"copies", c.members.size()}}));
  }
  return out;
}

std::vector<Finding> check_script_quality(std::span<const ScriptMetrics> scripts,
                                          const RuleConfig& cfg) {
  std::vector<Finding> out;
  for (const ScriptMetrics& m : scripts) {
    if (static_cast<std::int64_t>(m.lines) < cfg.script_min_lines) continue;
    const bool undocumented = m.comment_ratio < cfg.script_min_comment_ratio;
    const bool unindented = m.indent_ratio < cfg.script_min_indent_ratio;
    if (!undocumented && !unindented) continue;
    std::string what = undocumented && unindented ? "undocumented and unindented"
                       : undocumented             ? "undocumented"
                                                  : "unindented";
    out.push_back(MakeFinding(
        "SCRIPT_QUALITY", {},
        "Script module '" + m.name + "' has " + std::to_string(m.lines) +
            " lines and is " + what + ".",
        json{{"module", m.name},
             {"lines", m.lines},
             {"comment_ratio", m.comment_ratio},
             {"indent_ratio", m.indent_ratio}}));
  }
  return out;
}

void sort_findings(const Workbook& wb, std::vector<Finding>& findings) {
  auto first_location = [&wb](const Finding& f) {
    if (f.locations.empty()) return std::tuple<int, int, int, int>{0, -1, 0, 0};
    const auto key = wb.key_of(f.locations.front());
    if (!key) return std::tuple<int, int, int, int>{1, 0, 0, 0};
    return std::tuple<int, int, int, int>{1, key->sheet, key->row, key->col};
  };
  std::stable_sort(findings.begin(), findings.end(),
                   [&](const Finding& a, const Finding& b) {
                     if (a.severity != b.severity) return a.severity > b.severity;
                     if (a.rule_id != b.rule_id) return a.rule_id < b.rule_id;
                     const auto la = first_location(a);
                     const auto lb = first_location(b);
                     if (la != lb) return la < lb;
                     return a.message < b.message;
                   });
}

std::vector<Finding> run_rules(const AnalysisContext& ctx, const RuleConfig& cfg) {
  std::vector<Finding> all;
  auto add = [&all](std::vector<Finding> found) {
    for (Finding& f : found) all.push_back(std::move(f));
  };
  add(check_spec_presence(ctx.wb.manifest));
  add(check_calc_mode(ctx.wb.settings));
  add(check_external_links(ctx.wb, ctx.graph));
  add(check_stale_values(ctx.wb, ctx.staleness));
  add(check_hardcoded_constant(ctx.wb, ctx.formulas, ctx.classes, cfg));
  add(check_deep_nesting(ctx.wb, ctx.formulas, ctx.classes, cfg));
  add(check_long_formula(ctx.wb, ctx.formulas, ctx.classes, cfg));
  add(check_copy_class_holes(ctx.wb, ctx.classes, cfg));
  add(check_lookup_hotspots(ctx.wb, ctx.formulas, ctx.classes, cfg));
  add(check_script_quality(ctx.scripts, cfg));
  std::erase_if(all, [&cfg](const Finding& f) { return !cfg.is_enabled(f.rule_id); });
  sort_findings(ctx.wb, all);
  return all;
}

}  // namespace sheetsentry
