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

#ifndef SHEETSENTRY_NORMALIZER_H_
#define SHEETSENTRY_NORMALIZER_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sheetsentry/formula.h"
#include "sheetsentry/workbook.h"

namespace sheetsentry {

// Origin-independent rendering of a formula. Relative reference parts are
// written as offsets from the containing cell (R[-1], C[2], or bare R / C for
// a zero offset); absolute parts as R{row} / C{col}. Two formulas that are
// copies of one another normalize to the same text.
struct NormalizedFormula {
  std::string text;

  friend auto operator<=>(const NormalizedFormula&,
                          const NormalizedFormula&) = default;
};

NormalizedFormula normalize(const FormulaAst& ast, const CellKey& origin);

// Cells sharing one normalized formula: one "unique formula".
struct CopyClass {
  NormalizedFormula normalized;
  std::vector<CellKey> members;  // sorted; members.front() is the representative

  const CellKey& representative() const { return members.front(); }

  friend bool operator==(const CopyClass&, const CopyClass&) = default;
};

// Pools formula cells workbook-wide into copy classes, ordered by
// representative.
std::vector<CopyClass> copy_classes(std::span<const ParsedFormula> formulas);
std::vector<CopyClass> copy_classes(const Workbook& wb);

std::size_t unique_formula_count(const Workbook& wb);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_NORMALIZER_H_
