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

#include "sheetsentry/evaluator.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "sheetsentry/errors.h"

namespace sheetsentry {

namespace {

// Numeric coercion: numbers as-is, booleans 1/0, blank 0, numeric text parsed.
std::variant<double, ErrorCode> ToNumber(const EvalValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  if (is_blank(v)) return 0.0;
  if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
  const std::string& s = std::get<std::string>(v);
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  if (first == std::string::npos) return ErrorCode::kValue;
  double out = 0;
  const char* begin = s.data() + first;
  const char* end = s.data() + last + 1;
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    return ErrorCode::kValue;
  }
  return out;
}

std::variant<bool, ErrorCode> ToBool(const EvalValue& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  if (const auto* d = std::get_if<double>(&v)) return *d != 0;
  if (is_blank(v)) return false;
  if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
  return ErrorCode::kValue;
}

std::string FormatConcatNumber(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.15g", d);
  return buf;
}

std::variant<std::string, ErrorCode> ToText(const EvalValue& v) {
  if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
  if (const auto* d = std::get_if<double>(&v)) return FormatConcatNumber(*d);
  if (const auto* b = std::get_if<bool>(&v)) {
    return std::string(*b ? "TRUE" : "FALSE");
  }
  if (is_blank(v)) return std::string();
  return std::get<std::string>(v);
}

EvalValue Finite(double d) {
  if (!std::isfinite(d)) return ErrorCode::kValue;
  return d;
}

// Orders values as Number < Text < Boolean; blank takes the other side's
// type. Text compares case-insensitively.
int Compare(const EvalValue& a, const EvalValue& b) {
  auto rank = [](const EvalValue& v, const EvalValue& other) {
    const EvalValue& typed = is_blank(v) ? other : v;
    if (std::holds_alternative<std::string>(typed)) return 1;
    if (std::holds_alternative<bool>(typed)) return 2;
    return 0;
  };
  const int ra = rank(a, b);
  const int rb = rank(b, a);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) {
    const double x = std::get<double>(ToNumber(a));
    const double y = std::get<double>(ToNumber(b));
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (ra == 2) {
    const bool x = is_blank(a) ? false : std::get<bool>(a);
    const bool y = is_blank(b) ? false : std::get<bool>(b);
    return x == y ? 0 : (x ? 1 : -1);
  }
  const std::string x = to_upper(is_blank(a) ? "" : std::get<std::string>(a));
  const std::string y = to_upper(is_blank(b) ? "" : std::get<std::string>(b));
  return x.compare(y) < 0 ? -1 : (x == y ? 0 : 1);
}

double RoundHalfAway(double x, int digits) {
  const double p = std::pow(10.0, std::abs(digits));
  double scaled = digits >= 0 ? x * p : x / p;
  // Strip binary noise so 2.675 rounds like its decimal spelling.
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", scaled);
  scaled = std::strtod(buf, nullptr);
  const double r = std::round(scaled);
  return digits >= 0 ? r / p : r * p;
}

class Engine {
 public:
  Engine(const Workbook& wb, std::set<CellKey> cyclic)
      : wb_(wb), cyclic_(std::move(cyclic)) {}

  // Evaluates the formula stored at `cell` and records its value.
  void EvaluateCell(const CellKey& cell, const FormulaAst& ast) {
    bool external = false;
    EvalValue v = Eval(ast, cell, external);
    if (is_blank(v)) v = 0.0;
    if (external) result_.external_dependent.insert(cell);
    result_.values[cell] = std::move(v);
  }

  void MarkCyclic(const CellKey& cell) {
    result_.values[cell] = ErrorCode::kCirc;
  }

  Recomputation Take() { return std::move(result_); }

 private:
  EvalValue ValueAt(const CellKey& key, bool& external) const {
    const Cell* cell = wb_.cell(key);
    if (cell == nullptr) return Blank{};
    if (!cell->has_formula()) return cell->cached;
    if (cyclic_.count(key)) return ErrorCode::kCirc;
    auto it = result_.values.find(key);
    if (it == result_.values.end()) return ErrorCode::kCirc;
    if (result_.external_dependent.count(key)) external = true;
    return it->second;
  }

  std::optional<int> SheetOf(const Reference& r, const CellKey& origin) const {
    if (!r.sheet) return origin.sheet;
    return wb_.find_sheet(*r.sheet);
  }

  // Visits the stored cells of a reference or range argument; blank cells
  // are skipped. Returns an error for external or unresolvable references.
  template <typename Fn>
  std::optional<ErrorCode> ForEachStored(const FormulaAst& node,
                                         const CellKey& origin, bool& external,
                                         Fn&& fn) const {
    Reference start;
    Reference end;
    if (const auto* r = node.as<Reference>()) {
      start = end = *r;
    } else {
      start = node.as<RangeRef>()->start;
      end = node.as<RangeRef>()->end;
    }
    if (start.is_external()) {
      external = true;
      return ErrorCode::kRef;
    }
    const auto sheet = SheetOf(start, origin);
    if (!sheet) return ErrorCode::kRef;
    const auto& cells = wb_.sheets[*sheet].cells;
    for (auto it = cells.lower_bound(GridPos{start.row, 0});
         it != cells.end() && it->first.row <= end.row; ++it) {
      if (it->first.col < start.col || it->first.col > end.col) continue;
      fn(ValueAt(CellKey{*sheet, it->first.row, it->first.col}, external));
    }
    return std::nullopt;
  }

  static bool IsRefArg(const FormulaAst& node) {
    return node.is<Reference>() || node.is<RangeRef>();
  }

  EvalValue Eval(const FormulaAst& node, const CellKey& origin,
                 bool& external) const {
    if (const auto* n = node.as<NumberLit>()) return n->value;
    if (const auto* t = node.as<TextLit>()) return t->value;
    if (const auto* b = node.as<BoolLit>()) return b->value;
    if (node.is<Name>()) return ErrorCode::kName;
    if (node.is<RangeRef>()) {
      if (node.as<RangeRef>()->start.is_external()) external = true;
      return ErrorCode::kValue;
    }
    if (const auto* r = node.as<Reference>()) {
      if (r->is_external()) {
        external = true;
        return ErrorCode::kRef;
      }
      const auto sheet = SheetOf(*r, origin);
      if (!sheet) return ErrorCode::kRef;
      return ValueAt(CellKey{*sheet, r->row, r->col}, external);
    }
    if (const auto* u = node.as<Unary>()) {
      const auto x = ToNumber(Eval(*u->operand, origin, external));
      if (const auto* e = std::get_if<ErrorCode>(&x)) return *e;
      const double d = std::get<double>(x);
      return u->op == UnaryOp::kNeg ? -d : d;
    }
    if (const auto* b = node.as<Binary>()) return EvalBinary(*b, origin, external);
    return EvalCall(*node.as<Call>(), origin, external);
  }

  EvalValue EvalBinary(const Binary& b, const CellKey& origin,
                       bool& external) const {
    const EvalValue l = Eval(*b.left, origin, external);
    const EvalValue r = Eval(*b.right, origin, external);
    if (const auto* e = std::get_if<ErrorCode>(&l)) return *e;
    if (const auto* e = std::get_if<ErrorCode>(&r)) return *e;
    switch (b.op) {
      case BinaryOp::kConcat:
        return std::get<std::string>(ToText(l)) + std::get<std::string>(ToText(r));
      case BinaryOp::kEq: return Compare(l, r) == 0;
      case BinaryOp::kNe: return Compare(l, r) != 0;
      case BinaryOp::kLt: return Compare(l, r) < 0;
      case BinaryOp::kLe: return Compare(l, r) <= 0;
      case BinaryOp::kGt: return Compare(l, r) > 0;
      case BinaryOp::kGe: return Compare(l, r) >= 0;
      default:
        break;
    }
    const auto ln = ToNumber(l);
    if (const auto* e = std::get_if<ErrorCode>(&ln)) return *e;
    const auto rn = ToNumber(r);
    if (const auto* e = std::get_if<ErrorCode>(&rn)) return *e;
    const double x = std::get<double>(ln);
    const double y = std::get<double>(rn);
    switch (b.op) {
      case BinaryOp::kAdd: return Finite(x + y);
      case BinaryOp::kSub: return Finite(x - y);
      case BinaryOp::kMul: return Finite(x * y);
      case BinaryOp::kDiv:
        if (y == 0) return ErrorCode::kDiv0;
        return Finite(x / y);
      case BinaryOp::kPow:
        if (x == 0 && y < 0) return ErrorCode::kDiv0;
        return Finite(std::pow(x, y));
      default:
        return ErrorCode::kValue;
    }
  }

  EvalValue EvalCall(const Call& c, const CellKey& origin, bool& external) const {
    const auto& args = c.args;
    const std::string& fn = c.name;
    if (fn == "IF") {
      if (args.size() < 2 || args.size() > 3) return ErrorCode::kValue;
      const auto cond = ToBool(Eval(args[0], origin, external));
      if (const auto* e = std::get_if<ErrorCode>(&cond)) return *e;
      if (std::get<bool>(cond)) return Eval(args[1], origin, external);
      if (args.size() == 3) return Eval(args[2], origin, external);
      return false;
    }
    if (fn == "SUM" || fn == "MIN" || fn == "MAX" || fn == "COUNT" ||
        fn == "AVERAGE") {
      return Aggregate(fn, args, origin, external);
    }
    if (fn == "AND" || fn == "OR") return Logical(fn == "AND", args, origin, external);
    if (fn == "NOT") {
      if (args.size() != 1) return ErrorCode::kValue;
      const auto v = ToBool(Eval(args[0], origin, external));
      if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
      return !std::get<bool>(v);
    }
    if (fn == "ABS") {
      if (args.size() != 1) return ErrorCode::kValue;
      const auto v = ToNumber(Eval(args[0], origin, external));
      if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
      return std::fabs(std::get<double>(v));
    }
    if (fn == "ROUND") {
      if (args.size() != 2) return ErrorCode::kValue;
      const auto v = ToNumber(Eval(args[0], origin, external));
      const auto d = ToNumber(Eval(args[1], origin, external));
      if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
      if (const auto* e = std::get_if<ErrorCode>(&d)) return *e;
      const double digits = std::trunc(std::get<double>(d));
      if (std::fabs(digits) > 300) return ErrorCode::kValue;
      return Finite(RoundHalfAway(std::get<double>(v), static_cast<int>(digits)));
    }
    if (fn == "VLOOKUP") return Vlookup(args, origin, external);
    return ErrorCode::kName;
  }

  EvalValue Aggregate(const std::string& fn, const std::vector<FormulaAst>& args,
                      const CellKey& origin, bool& external) const {
    if (args.empty()) return ErrorCode::kValue;
    const bool count_only = fn == "COUNT";
    std::vector<double> values;
    std::optional<ErrorCode> error;
    for (const FormulaAst& arg : args) {
      if (IsRefArg(arg)) {
        auto failed = ForEachStored(arg, origin, external, [&](const EvalValue& v) {
          if (const auto* d = std::get_if<double>(&v)) {
            values.push_back(*d);
          } else if (const auto* e = std::get_if<ErrorCode>(&v)) {
            if (!error) error = *e;
          }
        });
        if (failed && !count_only && !error) error = failed;
        continue;
      }
      const EvalValue v = Eval(arg, origin, external);
      const auto n = ToNumber(v);
      if (const auto* e = std::get_if<ErrorCode>(&n)) {
        if (!error) error = *e;
        continue;
      }
      values.push_back(std::get<double>(n));
    }
    if (count_only) return static_cast<double>(values.size());
    if (error) return *error;
    if (fn == "SUM") {
      double s = 0;
      for (double d : values) s += d;
      return Finite(s);
    }
    if (fn == "AVERAGE") {
      if (values.empty()) return ErrorCode::kDiv0;
      double s = 0;
      for (double d : values) s += d;
      return Finite(s / static_cast<double>(values.size()));
    }
    if (values.empty()) return 0.0;
    return fn == "MIN" ? *std::min_element(values.begin(), values.end())
                       : *std::max_element(values.begin(), values.end());
  }

  EvalValue Logical(bool is_and, const std::vector<FormulaAst>& args,
                    const CellKey& origin, bool& external) const {
    if (args.empty()) return ErrorCode::kValue;
    bool seen = false;
    bool acc = is_and;
    std::optional<ErrorCode> error;
    auto take = [&](bool b) {
      seen = true;
      acc = is_and ? (acc && b) : (acc || b);
    };
    for (const FormulaAst& arg : args) {
      if (IsRefArg(arg)) {
        auto failed = ForEachStored(arg, origin, external, [&](const EvalValue& v) {
          if (const auto* b = std::get_if<bool>(&v)) {
            take(*b);
          } else if (const auto* d = std::get_if<double>(&v)) {
            take(*d != 0);
          } else if (const auto* e = std::get_if<ErrorCode>(&v)) {
            if (!error) error = *e;
          }
        });
        if (failed && !error) error = failed;
        continue;
      }
      const auto b = ToBool(Eval(arg, origin, external));
      if (const auto* e = std::get_if<ErrorCode>(&b)) {
        if (!error) error = *e;
        continue;
      }
      take(std::get<bool>(b));
    }
    if (error) return *error;
    if (!seen) return ErrorCode::kValue;
    return acc;
  }

  // Exact-match linear scan down the first column of the table.
  EvalValue Vlookup(const std::vector<FormulaAst>& args, const CellKey& origin,
                    bool& external) const {
    if (args.size() < 3 || args.size() > 4) return ErrorCode::kValue;
    const EvalValue key = Eval(args[0], origin, external);
    if (const auto* e = std::get_if<ErrorCode>(&key)) return *e;
    const FormulaAst& table = args[1];
    if (!IsRefArg(table)) return ErrorCode::kValue;
    const auto col = ToNumber(Eval(args[2], origin, external));
    if (const auto* e = std::get_if<ErrorCode>(&col)) return *e;
    if (args.size() == 4) {
      const EvalValue mode = Eval(args[3], origin, external);
      if (const auto* e = std::get_if<ErrorCode>(&mode)) return *e;
    }
    Reference start;
    Reference end;
    if (const auto* r = table.as<Reference>()) {
      start = end = *r;
    } else {
      start = table.as<RangeRef>()->start;
      end = table.as<RangeRef>()->end;
    }
    if (start.is_external()) {
      external = true;
      return ErrorCode::kRef;
    }
    const auto sheet = SheetOf(start, origin);
    if (!sheet) return ErrorCode::kRef;
    const double index = std::trunc(std::get<double>(col));
    if (index < 1) return ErrorCode::kValue;
    if (index > end.col - start.col + 1) return ErrorCode::kRef;
    if (is_blank(key)) return ErrorCode::kNA;
    for (int row = start.row; row <= end.row; ++row) {
      const EvalValue probe = ValueAt(CellKey{*sheet, row, start.col}, external);
      if (is_blank(probe) || is_error(probe)) continue;
      if (Compare(probe, key) == 0) {
        return ValueAt(
            CellKey{*sheet, row, start.col + static_cast<int>(index) - 1},
            external);
      }
    }
    return ErrorCode::kNA;
  }

  const Workbook& wb_;
  std::set<CellKey> cyclic_;
  Recomputation result_;
};

std::set<CellKey> CyclicCells(const DepGraph& g, const EvaluationPlan& plan) {
  std::set<CellKey> out;
  for (std::size_t i = 0; i < plan.cyclic.size(); ++i) {
    if (plan.cyclic[i] && !g.nodes()[i].is_aggregate()) {
      out.insert(g.nodes()[i].cell);
    }
  }
  return out;
}

}  // namespace

Recomputation recompute(const Workbook& wb, std::span<const ParsedFormula> formulas,
                        const DepGraph& g, TieBreak tie_break) {
  const EvaluationPlan plan = evaluation_plan(g, tie_break);
  std::map<CellKey, const FormulaAst*> asts;
  for (const ParsedFormula& pf : formulas) asts[pf.cell] = &pf.ast;
  std::set<CellKey> cyclic = CyclicCells(g, plan);
  Engine engine(wb, cyclic);
  for (const CellKey& cell : cyclic) {
    if (asts.count(cell)) engine.MarkCyclic(cell);
  }
  for (DepGraph::NodeId id : plan.order) {
    const GraphNode& node = g.nodes()[id];
    if (node.is_aggregate()) continue;
    auto it = asts.find(node.cell);
    if (it != asts.end()) engine.EvaluateCell(node.cell, *it->second);
  }
  return engine.Take();
}

std::map<CellKey, EvalValue> recompute_workbook(const Workbook& wb) {
  const std::vector<ParsedFormula> formulas = parse_all(wb);
  const DepGraph g = build_graph(wb, formulas);
  return recompute(wb, formulas, g).values;
}

EvalValue evaluate_cell(const Workbook& wb, const DepGraph& g,
                        const CellKey& cell) {
  const auto target = g.find(cell);
  if (!target) {
    const Cell* stored = wb.cell(cell);
    if (stored != nullptr && !stored->has_formula()) return stored->cached;
    throw UnknownNode("no graph node for " + to_string(wb.address_of(cell)));
  }
  const Cell* stored = wb.cell(cell);
  if (stored == nullptr) return Blank{};
  if (!stored->has_formula()) return stored->cached;

  // Transitive precedents of the target.
  std::vector<bool> needed(g.node_count(), false);
  std::vector<DepGraph::NodeId> stack{*target};
  needed[*target] = true;
  while (!stack.empty()) {
    const DepGraph::NodeId v = stack.back();
    stack.pop_back();
    for (DepGraph::NodeId p : g.precedents_of(v)) {
      if (!needed[p]) {
        needed[p] = true;
        stack.push_back(p);
      }
    }
  }

  const EvaluationPlan plan = evaluation_plan(g);
  std::vector<ParsedFormula> formulas;
  for (DepGraph::NodeId id = 0; id < g.node_count(); ++id) {
    if (!needed[id] || g.nodes()[id].is_aggregate()) continue;
    const Cell* c = wb.cell(g.nodes()[id].cell);
    if (c == nullptr || !c->has_formula()) continue;
    try {
      formulas.push_back(ParsedFormula{g.nodes()[id].cell, parse_formula(*c->formula), 0});
    } catch (const ParseError& e) {
      throw ParseError(to_string(wb.address_of(g.nodes()[id].cell)), e);
    }
  }
  std::map<CellKey, const FormulaAst*> asts;
  for (const ParsedFormula& pf : formulas) asts[pf.cell] = &pf.ast;

  std::set<CellKey> cyclic = CyclicCells(g, plan);
  if (cyclic.count(cell)) return ErrorCode::kCirc;
  Engine engine(wb, cyclic);
  for (DepGraph::NodeId id : plan.order) {
    if (!needed[id]) continue;
    auto it = asts.find(g.nodes()[id].cell);
    if (it != asts.end() && !g.nodes()[id].is_aggregate()) {
      engine.EvaluateCell(it->first, *it->second);
    }
  }
  return engine.Take().values.at(cell);
}

bool is_stale(const CellValue& cached, const EvalValue& recomputed) {
  if (is_number(cached) && is_number(recomputed)) {
    const double c = std::get<double>(cached);
    const double r = std::get<double>(recomputed);
    return std::fabs(c - r) > kStaleTolerance * std::max(1.0, std::fabs(r));
  }
  return !(cached == recomputed);
}

StalenessReport staleness_report(const Workbook& wb,
                                 const Recomputation& recomputed) {
  StalenessReport report;
  for (const auto& [cell, value] : recomputed.values) {
    const Cell* stored = wb.cell(cell);
    if (stored == nullptr) continue;
    const auto* err = std::get_if<ErrorCode>(&value);
    if (err != nullptr && *err == ErrorCode::kRef &&
        recomputed.external_dependent.count(cell)) {
      report.external_excluded.push_back(cell);
      continue;
    }
    if (!is_stale(stored->cached, value)) continue;
    StaleEntry entry{cell, stored->cached, value, std::nullopt};
    if (is_number(stored->cached) && is_number(value)) {
      const double r = std::get<double>(value);
      entry.relative_delta =
          std::fabs(std::get<double>(stored->cached) - r) / std::max(1.0, std::fabs(r));
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

StalenessReport staleness_report(const Workbook& wb) {
  const std::vector<ParsedFormula> formulas = parse_all(wb);
  const DepGraph g = build_graph(wb, formulas);
  return staleness_report(wb, recompute(wb, formulas, g));
}

}  // namespace sheetsentry
