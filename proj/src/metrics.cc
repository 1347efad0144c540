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

#include "sheetsentry/metrics.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "sheetsentry/errors.h"

namespace sheetsentry {

double error_probability(double p, std::int64_t unique_formulae) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("error rate p must lie in [0, 1], got " + std::to_string(p));
  }
  if (unique_formulae < 0) {
    throw DomainError("unique formula count must be >= 0, got " +
                      std::to_string(unique_formulae));
  }
  if (unique_formulae == 0) return 0.0;
  return 1.0 - std::pow(1.0 - p, static_cast<double>(unique_formulae));
}

int error_probability_pct(double probability) {
  return static_cast<int>(std::lround(100.0 * probability));
}

std::size_t branch_count(const FormulaAst& ast) {
  std::size_t ifs = 0;
  visit_nodes(ast, [&ifs](const FormulaAst& node) {
    if (const auto* c = node.as<Call>(); c != nullptr && c->name == "IF") ++ifs;
  });
  return ifs == 0 ? 0 : ifs + 1;
}

std::size_t vlookup_count(const FormulaAst& ast) {
  std::size_t n = 0;
  visit_nodes(ast, [&n](const FormulaAst& node) {
    if (const auto* c = node.as<Call>(); c != nullptr && c->name == "VLOOKUP") ++n;
  });
  return n;
}

namespace {

bool IsAggregate(const std::string& name) {
  return name == "SUM" || name == "COUNT" || name == "AVERAGE" || name == "MIN" ||
         name == "MAX";
}

std::uint64_t NodeCost(const FormulaAst& node) {
  if (const auto* u = node.as<Unary>()) return 1 + NodeCost(*u->operand);
  if (const auto* b = node.as<Binary>()) {
    return 1 + NodeCost(*b->left) + NodeCost(*b->right);
  }
  const auto* c = node.as<Call>();
  if (c == nullptr) return 0;
  std::uint64_t cost = 0;
  if (IsAggregate(c->name)) {
    for (const FormulaAst& arg : c->args) {
      if (const auto* rr = arg.as<RangeRef>()) {
        cost += rr->cell_count();
      } else {
        cost += 1 + NodeCost(arg);
      }
    }
    return cost;
  }
  if (c->name == "VLOOKUP") {
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      const FormulaAst& arg = c->args[i];
      if (i == 1) {
        const auto* rr = arg.as<RangeRef>();
        cost += rr != nullptr ? static_cast<std::uint64_t>(rr->rows()) : 1;
      } else {
        cost += NodeCost(arg);
      }
    }
    return cost;
  }
  cost = 1 + c->args.size();
  for (const FormulaAst& arg : c->args) cost += NodeCost(arg);
  return cost;
}

}  // namespace

std::uint64_t formula_cost(const FormulaAst& ast) { return 1 + NodeCost(ast); }

RecalcCost recalc_cost(std::span<const ParsedFormula> formulas, std::size_t top_k) {
  RecalcCost result;
  std::vector<CellCost> all;
  all.reserve(formulas.size());
  for (const ParsedFormula& pf : formulas) {
    const std::uint64_t cost = formula_cost(pf.ast);
    result.total += cost;
    all.push_back(CellCost{pf.cell, cost});
  }
  const std::size_t k = std::min(top_k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                    all.end(), [](const CellCost& a, const CellCost& b) {
                      if (a.cost != b.cost) return a.cost > b.cost;
                      return a.cell < b.cell;
                    });
  all.resize(k);
  result.top = std::move(all);
  return result;
}

RecalcCost recalc_cost(const Workbook& wb, std::size_t top_k) {
  const std::vector<ParsedFormula> formulas = parse_all(wb);
  return recalc_cost(formulas, top_k);
}

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool StartsWithWord(std::string_view line, std::string_view word) {
  if (line.substr(0, word.size()) != word) return false;
  return line.size() == word.size() || line[word.size()] == ' ' ||
         line[word.size()] == '\t' || line[word.size()] == '(';
}

bool IsCommentLine(std::string_view trimmed) {
  if (!trimmed.empty() && trimmed[0] == '\'') return true;
  return StartsWithWord(Lower(trimmed.substr(0, 4)), "rem");
}

// Drops a trailing ' comment, ignoring quotes inside string literals.
std::string StripComment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '\'' && !in_string) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::string_view TrimRight(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

enum class LineRole { kOpener, kCloser, kMiddle, kPlain };

LineRole Classify(std::string_view trimmed) {
  std::string code = Lower(TrimRight(StripComment(trimmed)));
  std::string_view s = code;
  for (std::string_view modifier : {"public", "private", "friend", "static"}) {
    if (StartsWithWord(s, modifier)) {
      s.remove_prefix(modifier.size());
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    }
  }
  static constexpr std::array<std::string_view, 9> kClosers = {
      "end sub", "end function", "end property", "end if",  "end with",
      "end select", "end type", "end enum", "wend"};
  for (std::string_view c : kClosers) {
    if (StartsWithWord(s, c)) return LineRole::kCloser;
  }
  if (StartsWithWord(s, "next") || StartsWithWord(s, "loop")) return LineRole::kCloser;
  if (StartsWithWord(s, "else") || StartsWithWord(s, "elseif") ||
      StartsWithWord(s, "case")) {
    return LineRole::kMiddle;
  }
  static constexpr std::array<std::string_view, 9> kOpeners = {
      "sub", "function", "property", "for", "do", "while", "with", "type", "enum"};
  for (std::string_view o : kOpeners) {
    if (StartsWithWord(s, o)) return LineRole::kOpener;
  }
  if (StartsWithWord(s, "select")) return LineRole::kOpener;
  // Only a block If ends its line with Then; single-line Ifs carry a body.
  if (StartsWithWord(s, "if") && s.size() >= 4 &&
      s.substr(s.size() - 4) == "then") {
    return LineRole::kOpener;
  }
  return LineRole::kPlain;
}

}  // namespace

ScriptMetrics script_metrics(const ScriptModule& module) {
  ScriptMetrics m;
  m.name = module.name;
  std::string_view src = module.source;
  int depth = 0;
  std::size_t pos = 0;
  while (pos < src.size()) {
    std::size_t end = src.find('\n', pos);
    if (end == std::string_view::npos) end = src.size();
    std::string_view line = src.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++m.lines;
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    ++m.nonblank_lines;
    const std::string_view trimmed = line.substr(first);
    const bool indented = first > 0;
    if (IsCommentLine(trimmed)) {
      ++m.comment_lines;
      if (depth > 0) {
        ++m.body_lines;
        m.indented_body_lines += indented;
      }
      continue;
    }
    switch (Classify(trimmed)) {
      case LineRole::kCloser:
        depth = std::max(0, depth - 1);
        break;
      case LineRole::kMiddle:
        break;
      case LineRole::kOpener:
        if (depth > 0) {
          ++m.body_lines;
          m.indented_body_lines += indented;
        }
        ++depth;
        break;
      case LineRole::kPlain:
        if (depth > 0) {
          ++m.body_lines;
          m.indented_body_lines += indented;
        }
        break;
    }
  }
  if (m.nonblank_lines > 0) {
    m.comment_ratio = static_cast<double>(m.comment_lines) /
                      static_cast<double>(m.nonblank_lines);
  }
  if (m.body_lines > 0) {
    m.indent_ratio = static_cast<double>(m.indented_body_lines) /
                     static_cast<double>(m.body_lines);
  }
  return m;
}

std::vector<ScriptMetrics> script_metrics(std::span<const ScriptModule> modules) {
  std::vector<ScriptMetrics> out;
  out.reserve(modules.size());
  for (const ScriptModule& m : modules) out.push_back(script_metrics(m));
  return out;
}

WorkbookMetrics compute_metrics(const Workbook& wb,
                                std::span<const ParsedFormula> formulas,
                                std::span<const CopyClass> classes,
                                const DepGraph& g, double p) {
  WorkbookMetrics m;
  m.formula_cells = formulas.size();
  m.value_cells = stored_cells(wb) - formulas.size();
  m.unique_formulae = classes.size();
  m.p = p;
  m.error_probability =
      error_probability(p, static_cast<std::int64_t>(m.unique_formulae));
  m.error_probability_pct = error_probability_pct(m.error_probability);
  for (const ParsedFormula& pf : formulas) {
    m.max_branching = std::max(m.max_branching, branch_count(pf.ast));
  }
  m.external_link_count = g.external_links().size();
  m.script_modules = wb.scripts.size();
  for (const ScriptMetrics& s : script_metrics(wb.scripts)) {
    m.script_lines_total += s.lines;
  }
  m.cost_estimate = recalc_cost(formulas, 0).total;
  return m;
}

WorkbookMetrics compute_metrics(const Workbook& wb, double p) {
  const std::vector<ParsedFormula> formulas = parse_all(wb);
  const std::vector<CopyClass> classes = copy_classes(formulas);
  const DepGraph g = build_graph(wb, formulas);
  return compute_metrics(wb, formulas, classes, g, p);
}

}  // namespace sheetsentry
