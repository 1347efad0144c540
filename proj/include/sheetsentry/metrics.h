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

#ifndef SHEETSENTRY_METRICS_H_
#define SHEETSENTRY_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sheetsentry/depgraph.h"
#include "sheetsentry/formula.h"
#include "sheetsentry/normalizer.h"
#include "sheetsentry/workbook.h"

namespace sheetsentry {

inline constexpr double kDefaultErrorRate = 0.01;

// Probability that a workbook with `unique_formulae` unique formulae contains
// at least one error when each is wrong with probability `p`:
// 1 - (1 - p)^n. Throws DomainError unless 0 <= p <= 1 and n >= 0.
double error_probability(double p, std::int64_t unique_formulae);

// Integer percent, rounded half away from zero.
int error_probability_pct(double probability);

// Leaf count of a formula's IF decision tree: 0 without any IF, otherwise
// the number of IF calls plus one.
std::size_t branch_count(const FormulaAst& ast);

std::size_t vlookup_count(const FormulaAst& ast);

// Abstract recalculation cost of one formula cell: 1 for the cell, plus 1 per
// operator, the covered cell count for SUM/COUNT/AVERAGE/MIN/MAX range
// arguments, the table row count for VLOOKUP, and 1 + argument count for
// other calls.
std::uint64_t formula_cost(const FormulaAst& ast);

struct CellCost {
  CellKey cell;
  std::uint64_t cost = 0;

  friend bool operator==(const CellCost&, const CellCost&) = default;
};

struct RecalcCost {
  std::uint64_t total = 0;
  std::vector<CellCost> top;  // descending cost, ties in address order
};

RecalcCost recalc_cost(std::span<const ParsedFormula> formulas, std::size_t top_k = 10);
RecalcCost recalc_cost(const Workbook& wb, std::size_t top_k = 10);

struct ScriptMetrics {
  std::string name;
  std::size_t lines = 0;          // physical lines
  std::size_t nonblank_lines = 0;
  std::size_t comment_lines = 0;
  std::size_t body_lines = 0;     // nonblank lines inside a block
  std::size_t indented_body_lines = 0;
  double comment_ratio = 1.0;     // comment_lines / nonblank_lines
  double indent_ratio = 1.0;      // indented_body_lines / body_lines

  friend bool operator==(const ScriptMetrics&, const ScriptMetrics&) = default;
};

ScriptMetrics script_metrics(const ScriptModule& module);
std::vector<ScriptMetrics> script_metrics(std::span<const ScriptModule> modules);

struct WorkbookMetrics {
  std::size_t formula_cells = 0;
  std::size_t value_cells = 0;
  std::size_t unique_formulae = 0;
  double p = kDefaultErrorRate;
  double error_probability = 0;
  int error_probability_pct = 0;
  std::size_t max_branching = 0;
  std::size_t external_link_count = 0;
  std::size_t script_modules = 0;
  std::size_t script_lines_total = 0;
  std::uint64_t cost_estimate = 0;

  friend bool operator==(const WorkbookMetrics&, const WorkbookMetrics&) = default;
};

WorkbookMetrics compute_metrics(const Workbook& wb,
                                std::span<const ParsedFormula> formulas,
                                std::span<const CopyClass> classes,
                                const DepGraph& g, double p = kDefaultErrorRate);
WorkbookMetrics compute_metrics(const Workbook& wb, double p = kDefaultErrorRate);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_METRICS_H_
