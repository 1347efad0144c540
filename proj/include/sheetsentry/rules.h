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

#ifndef SHEETSENTRY_RULES_H_
#define SHEETSENTRY_RULES_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sheetsentry/depgraph.h"
#include "sheetsentry/evaluator.h"
#include "sheetsentry/formula.h"
#include "sheetsentry/metrics.h"
#include "sheetsentry/normalizer.h"
#include "sheetsentry/workbook.h"

namespace sheetsentry {

enum class Severity { kInfo, kWarning, kError };

enum class Category {
  kSpecification,
  kCorrectness,
  kAuditability,
  kUsability,
  kMaintainability,
  kPerformance,
};

std::string_view severity_name(Severity s);
std::optional<Severity> parse_severity(std::string_view text);
std::string_view category_name(Category c);
std::optional<Category> parse_category(std::string_view text);

// Report order of categories.
inline constexpr Category kCategoryOrder[] = {
    Category::kSpecification,  Category::kCorrectness, Category::kAuditability,
    Category::kUsability,      Category::kMaintainability, Category::kPerformance};

struct Finding {
  std::string rule_id;
  Severity severity = Severity::kInfo;
  Category category = Category::kCorrectness;
  std::vector<CellAddress> locations;  // empty for workbook-level findings
  std::string message;
  nlohmann::json evidence = nlohmann::json::object();

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct RuleInfo {
  std::string_view id;
  Category category;
  Severity severity;
  std::string_view summary;
  std::string_view rationale;
  std::vector<std::string_view> thresholds;  // RuleConfig keys it reads
};

// Every rule the engine can emit, in id order.
const std::vector<RuleInfo>& rule_registry();
const RuleInfo* find_rule(std::string_view id);

struct RuleConfig {
  std::set<std::string> enabled;  // defaults to every registered rule
  std::int64_t const_min_repeats = 3;
  std::vector<double> const_whitelist = {0, 1, -1, 100};
  std::int64_t max_branches = 4;
  std::int64_t max_formula_tokens = 40;
  std::int64_t min_copy_class_for_hole = 5;
  std::int64_t lookup_cost_threshold = 1000;
  std::int64_t script_min_lines = 100;
  double script_min_comment_ratio = 0.05;
  double script_min_indent_ratio = 0.5;

  RuleConfig();
  bool is_enabled(std::string_view id) const { return enabled.count(std::string(id)) > 0; }

  friend bool operator==(const RuleConfig&, const RuleConfig&) = default;
};

// Reads a rule configuration document. Keys must be RuleConfig field names;
// missing keys keep their defaults. Throws FormatError.
RuleConfig parse_rule_config(std::string_view json_text);
RuleConfig rule_config_from_json(const nlohmann::json& j);
nlohmann::json rule_config_to_json(const RuleConfig& cfg);

// Everything the rules look at, all derived from one workbook.
struct AnalysisContext {
  const Workbook& wb;
  std::span<const ParsedFormula> formulas;  // CellKey order
  std::span<const CopyClass> classes;
  const DepGraph& graph;
  const StalenessReport& staleness;
  std::span<const ScriptMetrics> scripts;
};

// Runs every enabled rule. Findings are sorted by severity (highest first),
// then rule id, then first location in workbook order.
std::vector<Finding> run_rules(const AnalysisContext& ctx, const RuleConfig& cfg);

void sort_findings(const Workbook& wb, std::vector<Finding>& findings);

std::vector<Finding> check_spec_presence(const Manifest& manifest);
std::vector<Finding> check_calc_mode(const WorkbookSettings& settings);
std::vector<Finding> check_external_links(const Workbook& wb, const DepGraph& g);
std::vector<Finding> check_stale_values(const Workbook& wb,
                                        const StalenessReport& staleness);
std::vector<Finding> check_hardcoded_constant(const Workbook& wb,
                                              std::span<const ParsedFormula> formulas,
                                              std::span<const CopyClass> classes,
                                              const RuleConfig& cfg);
std::vector<Finding> check_deep_nesting(const Workbook& wb,
                                        std::span<const ParsedFormula> formulas,
                                        std::span<const CopyClass> classes,
                                        const RuleConfig& cfg);
std::vector<Finding> check_long_formula(const Workbook& wb,
                                        std::span<const ParsedFormula> formulas,
                                        std::span<const CopyClass> classes,
                                        const RuleConfig& cfg);
std::vector<Finding> check_copy_class_holes(const Workbook& wb,
                                            std::span<const CopyClass> classes,
                                            const RuleConfig& cfg);
std::vector<Finding> check_lookup_hotspots(const Workbook& wb,
                                           std::span<const ParsedFormula> formulas,
                                           std::span<const CopyClass> classes,
                                           const RuleConfig& cfg);
std::vector<Finding> check_script_quality(std::span<const ScriptMetrics> scripts,
                                          const RuleConfig& cfg);

nlohmann::json value_to_json(const CellValue& v);
CellValue value_from_json(const nlohmann::json& j);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_RULES_H_
