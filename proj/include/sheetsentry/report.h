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

#ifndef SHEETSENTRY_REPORT_H_
#define SHEETSENTRY_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sheetsentry/metrics.h"
#include "sheetsentry/rules.h"
#include "sheetsentry/workbook.h"

namespace sheetsentry {

inline constexpr std::string_view kToolName = "sheetsentry";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct StaleRecord {
  CellAddress cell;
  CellValue cached;
  CellValue recomputed;
  std::optional<double> relative_delta;

  friend bool operator==(const StaleRecord&, const StaleRecord&) = default;
};

struct StalenessSummary {
  std::vector<StaleRecord> entries;
  std::vector<CellAddress> external_excluded;

  friend bool operator==(const StalenessSummary&, const StalenessSummary&) = default;
};

struct ExternalLinkRecord {
  CellAddress source;
  std::string workbook;
  std::string sheet;  // empty when the reference names no sheet
  std::string target;

  friend bool operator==(const ExternalLinkRecord&,
                         const ExternalLinkRecord&) = default;
};

struct AuditReport {
  std::string workbook_path;
  std::string tool_version = std::string(kToolVersion);
  double p = kDefaultErrorRate;
  RuleConfig config;
  WorkbookMetrics metrics;
  std::vector<Finding> findings;
  StalenessSummary staleness;
  std::vector<ExternalLinkRecord> external_links;

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

// Full pipeline on a loaded workbook: parse, copy classes, graph, recompute,
// metrics, rules. Numbers in the result are already rounded to 15
// significant digits, so the report survives a JSON round trip unchanged.
AuditReport audit_workbook(const Workbook& wb, std::string workbook_path,
                           const RuleConfig& cfg = RuleConfig(),
                           double p = kDefaultErrorRate);

// Loads `path` first. Throws whatever load_workbook throws.
AuditReport audit_file(const std::filesystem::path& path,
                       const RuleConfig& cfg = RuleConfig(),
                       double p = kDefaultErrorRate);

// Nearest double with at most 15 significant decimal digits.
double round_sig15(double v);

// Canonical JSON: keys sorted, two-space indent, trailing newline.
std::string render_json(const AuditReport& report);
nlohmann::json report_to_json(const AuditReport& report);
// Inverse of render_json. Throws FormatError.
AuditReport parse_report(std::string_view json_text);

std::string render_text(const AuditReport& report);

// Metrics-only views used by the `metrics` subcommand.
nlohmann::json metrics_to_json(const WorkbookMetrics& m);
WorkbookMetrics metrics_from_json(const nlohmann::json& j);
std::string render_metrics_json(const std::string& workbook_path,
                                const WorkbookMetrics& m);
std::string render_metrics_text(const std::string& workbook_path,
                                const WorkbookMetrics& m);

// Rule catalog entry with defaults and the active values.
std::string render_explain(const RuleInfo& rule, const RuleConfig& cfg);

enum class ExitCode { kClean = 0, kFindings = 1, kFailure = 2 };

// kFindings when any finding is at or above `fail_on`, else kClean.
ExitCode exit_code_for(const std::vector<Finding>& findings, Severity fail_on);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_REPORT_H_
