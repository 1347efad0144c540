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

#include "sheetsentry/normalizer.h"

#include <algorithm>
#include <unordered_map>

namespace sheetsentry {

namespace {

std::string Axis(char axis, int value, int origin, bool absolute) {
  std::string out(1, axis);
  if (absolute) return out + std::to_string(value);
  const int delta = value - origin;
  if (delta != 0) out += "[" + std::to_string(delta) + "]";
  return out;
}

std::string Qualifier(const Reference& r) {
  std::string out;
  if (r.external) out += "[" + *r.external + "]";
  if (r.sheet) out += to_upper(*r.sheet) + "!";
  return out;
}

// Corner text without the qualifier. External references are always
// rendered absolute.
std::string Corner(const Reference& r, const CellKey& origin) {
  const bool ext = r.is_external();
  return Axis('R', r.row, origin.row, ext || r.abs_row) +
         Axis('C', r.col, origin.col, ext || r.abs_col);
}

}  // namespace

NormalizedFormula normalize(const FormulaAst& ast, const CellKey& origin) {
  const ReferenceRenderer relative{
      [&origin](const Reference& r) { return Qualifier(r) + Corner(r, origin); },
      [&origin](const RangeRef& rr) {
        return Qualifier(rr.start) + Corner(rr.start, origin) + ":" +
               Corner(rr.end, origin);
      }};
  return NormalizedFormula{serialize_formula(ast, relative)};
}

std::vector<CopyClass> copy_classes(std::span<const ParsedFormula> formulas) {
  std::vector<CopyClass> classes;
  std::unordered_map<std::string, std::size_t> index;
  for (const ParsedFormula& pf : formulas) {
    NormalizedFormula nf = normalize(pf.ast, pf.cell);
    auto [it, inserted] = index.try_emplace(nf.text, classes.size());
    if (inserted) classes.push_back(CopyClass{std::move(nf), {}});
    classes[it->second].members.push_back(pf.cell);
  }
  for (CopyClass& c : classes) std::sort(c.members.begin(), c.members.end());
  std::sort(classes.begin(), classes.end(),
            [](const CopyClass& a, const CopyClass& b) {
              return a.representative() < b.representative();
            });
  return classes;
}

std::vector<CopyClass> copy_classes(const Workbook& wb) {
  const std::vector<ParsedFormula> formulas = parse_all(wb);
  return copy_classes(formulas);
}

std::size_t unique_formula_count(const Workbook& wb) {
  return copy_classes(wb).size();
}

}  // namespace sheetsentry
