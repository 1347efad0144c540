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

#ifndef SHEETSENTRY_EVALUATOR_H_
#define SHEETSENTRY_EVALUATOR_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "sheetsentry/depgraph.h"
#include "sheetsentry/formula.h"
#include "sheetsentry/workbook.h"

namespace sheetsentry {

// Same variants as a stored cell value.
using EvalValue = CellValue;

// Relative tolerance for numeric staleness: |cached - recomputed| must exceed
// kStaleTolerance * max(1, |recomputed|).
inline constexpr double kStaleTolerance = 1e-9;

struct Recomputation {
  std::map<CellKey, EvalValue> values;  // formula cells only
  // Formula cells whose value depends on an external reference.
  std::set<CellKey> external_dependent;
};

// Recomputes every formula cell in dependency order. Cells on a cycle get
// #CIRC!. The result does not depend on `tie_break`.
Recomputation recompute(const Workbook& wb, std::span<const ParsedFormula> formulas,
                        const DepGraph& g,
                        TieBreak tie_break = TieBreak::kAddressOrder);

std::map<CellKey, EvalValue> recompute_workbook(const Workbook& wb);

// Value of a single cell, evaluating only its transitive precedents. Throws
// UnknownNode for a blank cell that no formula references.
EvalValue evaluate_cell(const Workbook& wb, const DepGraph& g,
                        const CellKey& cell);

struct StaleEntry {
  CellKey cell;
  CellValue cached;
  EvalValue recomputed;
  std::optional<double> relative_delta;  // numbers only

  friend bool operator==(const StaleEntry&, const StaleEntry&) = default;
};

struct StalenessReport {
  std::vector<StaleEntry> entries;
  // Cells left out because their recomputed #REF! comes from an external
  // link and cannot be checked.
  std::vector<CellKey> external_excluded;

  friend bool operator==(const StalenessReport&, const StalenessReport&) = default;
};

// True when a cached value disagrees with its recomputed value under the
// staleness tolerance.
bool is_stale(const CellValue& cached, const EvalValue& recomputed);

StalenessReport staleness_report(const Workbook& wb,
                                 const Recomputation& recomputed);
StalenessReport staleness_report(const Workbook& wb);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_EVALUATOR_H_
