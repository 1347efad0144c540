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

// Random generators and independent oracles shared by the property tests and
// the acceptance binary. Nothing here calls the code under test except the
// parser/serializer used to build input text.

#ifndef SHEETSENTRY_TESTS_TESTING_GENERATORS_H_
#define SHEETSENTRY_TESTS_TESTING_GENERATORS_H_

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "sheetsentry/formula.h"
#include "sheetsentry/workbook.h"

namespace sheetsentry::testing {

using Rng = std::mt19937_64;

inline int Uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool Chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(Uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

// ---------------------------------------------------------------------------
// Arbitrary ASTs for the parser round trip.

struct AstOptions {
  int max_depth = 8;
  bool text = true;
  bool names = true;
  bool external = true;
  bool qualified = true;
  // Reference coordinates are drawn from [1, max_row] x [1, max_col].
  int max_row = kMaxRow;
  int max_col = kMaxColumn;
};

inline double RandomNumber(Rng& rng) {
  switch (Uniform(rng, 0, 5)) {
    case 0: return Uniform(rng, 0, 9);
    case 1: return Uniform(rng, 0, 100000);
    case 2: return Uniform(rng, 0, 4000) / 8.0;
    case 3: return std::ldexp(static_cast<double>(Uniform(rng, 1, 1 << 20)), Uniform(rng, -60, 60));
    case 4: return std::uniform_real_distribution<double>(0, 1000)(rng);
    default: return Pick(rng, std::vector<double>{0.1, 0.3, 1e-7, 2.5e15, 1e21, 123456789.125});
  }
}

inline std::string RandomText(Rng& rng) {
  static const std::string kChars = "abcXYZ019 _-+*/\"'!:,()$[]&=<>";
  std::string out;
  const int n = Uniform(rng, 0, 8);
  for (int i = 0; i < n; ++i) out += kChars[static_cast<std::size_t>(Uniform(rng, 0, static_cast<int>(kChars.size()) - 1))];
  return out;
}

inline const std::vector<std::string>& SheetNamePool() {
  static const std::vector<std::string> kNames = {"Sheet2", "Data",   "My Sheet",
                                                  "O'Brien", "2024",  "Q1",
                                                  "Rates_v2", "Inputs"};
  return kNames;
}

inline const std::vector<std::string>& FunctionNamePool() {
  static const std::vector<std::string> kNames = {
      "SUM", "MIN", "MAX", "COUNT", "AVERAGE", "IF", "AND", "OR", "NOT",
      "ABS", "ROUND", "VLOOKUP", "NPV", "LOG10", "INDEX", "MY_FUNC"};
  return kNames;
}

inline const std::vector<std::string>& IdentifierPool() {
  static const std::vector<std::string> kNames = {"RATE_TABLE", "TAXRATE", "N_1", "AGE_LIMIT",
                                                  "X", "PREMIUM"};
  return kNames;
}

inline int SkewedCoordinate(Rng& rng, int max) {
  if (Chance(rng, 0.8)) return Uniform(rng, 1, std::min(max, 60));
  return Uniform(rng, 1, max);
}

inline Reference RandomQualifier(Rng& rng, const AstOptions& opt) {
  Reference r;
  if (opt.qualified && Chance(rng, 0.25)) {
    r.sheet = Pick(rng, SheetNamePool());
    if (opt.external && Chance(rng, 0.3)) r.external = Pick(rng, std::vector<std::string>{"Rates", "Book 2.xlsx", "Q"});
  }
  return r;
}

inline Reference RandomReference(Rng& rng, const AstOptions& opt) {
  Reference r = RandomQualifier(rng, opt);
  r.col = SkewedCoordinate(rng, opt.max_col);
  r.row = SkewedCoordinate(rng, opt.max_row);
  r.abs_col = Chance(rng, 0.3);
  r.abs_row = Chance(rng, 0.3);
  return r;
}

inline RangeRef RandomRange(Rng& rng, const AstOptions& opt) {
  RangeRef rr;
  rr.start = RandomReference(rng, opt);
  rr.end = rr.start;
  rr.end.col = std::min(opt.max_col, rr.start.col + Uniform(rng, 0, 5));
  rr.end.row = std::min(opt.max_row, rr.start.row + Uniform(rng, 0, 30));
  rr.end.abs_col = Chance(rng, 0.3);
  rr.end.abs_row = Chance(rng, 0.3);
  return rr;
}

inline FormulaAst RandomLeaf(Rng& rng, const AstOptions& opt) {
  const int kind = Uniform(rng, 0, 9);
  switch (kind) {
    case 0:
    case 1:
    case 2: return ast::num(RandomNumber(rng));
    case 3: return opt.text ? ast::text(RandomText(rng)) : ast::num(RandomNumber(rng));
    case 4: return ast::boolean(Chance(rng, 0.5));
    case 5: return opt.names ? ast::name(Pick(rng, IdentifierPool())) : ast::num(RandomNumber(rng));
    case 6: return FormulaAst{RandomRange(rng, opt)};
    default: return ast::ref(RandomReference(rng, opt));
  }
}

inline FormulaAst RandomAst(Rng& rng, const AstOptions& opt, int depth) {
  if (depth <= 0 || Chance(rng, 0.2)) return RandomLeaf(rng, opt);
  const int kind = Uniform(rng, 0, 9);
  if (kind <= 1) {
    return ast::unary(Chance(rng, 0.7) ? UnaryOp::kNeg : UnaryOp::kPlus,
                      RandomAst(rng, opt, depth - 1));
  }
  if (kind <= 6) {
    const auto op = static_cast<BinaryOp>(Uniform(rng, 0, static_cast<int>(BinaryOp::kGe)));
    return ast::binary(op, RandomAst(rng, opt, depth - 1), RandomAst(rng, opt, depth - 1));
  }
  std::vector<FormulaAst> args;
  const int n = Uniform(rng, 0, 4);
  for (int i = 0; i < n; ++i) args.push_back(RandomAst(rng, opt, depth - 1));
  return ast::call(Pick(rng, FunctionNamePool()), std::move(args));
}

inline FormulaAst RandomAst(Rng& rng, const AstOptions& opt = AstOptions()) {
  return RandomAst(rng, opt, opt.max_depth);
}

// ---------------------------------------------------------------------------
// Copy translation, written independently of the normalizer: shifts every
// relative coordinate of every in-workbook reference. nullopt when a shifted
// coordinate leaves the grid.

inline bool ShiftReference(Reference& r, int dr, int dc) {
  if (r.is_external()) return true;
  if (!r.abs_row) r.row += dr;
  if (!r.abs_col) r.col += dc;
  return r.row >= 1 && r.row <= kMaxRow && r.col >= 1 && r.col <= kMaxColumn;
}

inline std::optional<FormulaAst> Translate(const FormulaAst& node, int dr, int dc) {
  if (const auto* r = node.as<Reference>()) {
    Reference out = *r;
    if (!ShiftReference(out, dr, dc)) return std::nullopt;
    return FormulaAst{out};
  }
  if (const auto* rr = node.as<RangeRef>()) {
    RangeRef out = *rr;
    if (!ShiftReference(out.start, dr, dc) || !ShiftReference(out.end, dr, dc)) {
      return std::nullopt;
    }
    return FormulaAst{out};
  }
  if (const auto* u = node.as<Unary>()) {
    auto operand = Translate(*u->operand, dr, dc);
    if (!operand) return std::nullopt;
    return ast::unary(u->op, std::move(*operand));
  }
  if (const auto* b = node.as<Binary>()) {
    auto l = Translate(*b->left, dr, dc);
    auto r = Translate(*b->right, dr, dc);
    if (!l || !r) return std::nullopt;
    return ast::binary(b->op, std::move(*l), std::move(*r));
  }
  if (const auto* c = node.as<Call>()) {
    std::vector<FormulaAst> args;
    for (const FormulaAst& a : c->args) {
      auto t = Translate(a, dr, dc);
      if (!t) return std::nullopt;
      args.push_back(std::move(*t));
    }
    return ast::call(c->name, std::move(args));
  }
  return node;
}

// ---------------------------------------------------------------------------
// Random acyclic workbooks: sheet "Inputs" holds only numbers; sheet "Calc"
// is a grid where a formula may read Inputs, any cell in an earlier row, or
// an earlier cell of its own row. Ranges only cover earlier rows.

struct AcyclicOptions {
  int rows = 10;
  int cols = 5;  // rows * cols bounds the Calc cell count (default 50)
  int input_cells = 6;
  int max_depth = 3;
};

inline FormulaAst RandomCalcRef(Rng& rng, int row, int col, int input_cells) {
  if (Chance(rng, 0.2)) {
    Reference r;
    r.sheet = "Inputs";
    r.row = Uniform(rng, 1, input_cells + 1);  // one past the end is blank
    r.col = 1;
    r.abs_col = Chance(rng, 0.5);
    r.abs_row = Chance(rng, 0.5);
    return ast::ref(r);
  }
  Reference r;
  r.row = Uniform(rng, 1, row);
  r.col = r.row == row ? Uniform(rng, 1, std::max(1, col - 1)) : Uniform(rng, 1, 6);
  if (r.row == row && r.col >= col) r.row = std::max(1, row - 1);
  r.abs_row = Chance(rng, 0.2);
  r.abs_col = Chance(rng, 0.2);
  return ast::ref(r);
}

inline FormulaAst RandomCalcExpr(Rng& rng, int row, int col, int depth, int input_cells) {
  if (depth <= 0 || Chance(rng, 0.25)) {
    if (Chance(rng, 0.35)) return ast::num(Uniform(rng, 0, 12) / (Chance(rng, 0.3) ? 4.0 : 1.0));
    return RandomCalcRef(rng, row, col, input_cells);
  }
  auto sub = [&] { return RandomCalcExpr(rng, row, col, depth - 1, input_cells); };
  switch (Uniform(rng, 0, 9)) {
    case 0:
    case 1:
    case 2:
    case 3: {
      static const std::vector<BinaryOp> kArith = {BinaryOp::kAdd, BinaryOp::kSub,
                                                   BinaryOp::kMul, BinaryOp::kDiv};
      return ast::binary(Pick(rng, kArith), sub(), sub());
    }
    case 4: {
      static const std::vector<BinaryOp> kCmp = {BinaryOp::kEq, BinaryOp::kNe, BinaryOp::kLt,
                                                 BinaryOp::kLe, BinaryOp::kGt, BinaryOp::kGe};
      return ast::binary(Pick(rng, kCmp), sub(), sub());
    }
    case 5:
    case 6: {
      std::vector<FormulaAst> args;
      args.push_back(sub());
      args.push_back(sub());
      if (Chance(rng, 0.8)) args.push_back(sub());
      return ast::call("IF", std::move(args));
    }
    case 7:
    case 8: {
      std::vector<FormulaAst> args;
      const int n = Uniform(rng, 1, 3);
      for (int i = 0; i < n; ++i) {
        if (row > 1 && Chance(rng, 0.5)) {
          const int r1 = Uniform(rng, 1, row - 1);
          const int r2 = Uniform(rng, r1, row - 1);
          const int c1 = Uniform(rng, 1, 6);
          const int c2 = Uniform(rng, c1, 6);
          RangeRef rr;
          rr.start.row = r1;
          rr.start.col = c1;
          rr.end.row = r2;
          rr.end.col = c2;
          args.push_back(FormulaAst{rr});
        } else {
          args.push_back(sub());
        }
      }
      return ast::call("SUM", std::move(args));
    }
    default:
      return ast::unary(UnaryOp::kNeg, sub());
  }
}

inline Workbook RandomAcyclicWorkbook(Rng& rng, const AcyclicOptions& opt = AcyclicOptions()) {
  Workbook wb;
  Sheet& inputs = wb.add_sheet("Inputs");
  for (int r = 1; r <= opt.input_cells; ++r) {
    inputs.set(render_address(1, r), Cell::Value(static_cast<double>(Uniform(rng, -3, 9))));
  }
  Sheet& calc = wb.add_sheet("Calc");
  for (int r = 1; r <= opt.rows; ++r) {
    for (int c = 1; c <= opt.cols; ++c) {
      if (Chance(rng, 0.15)) continue;
      if (r == 1 || Chance(rng, 0.35)) {
        calc.set(render_address(c, r),
                 Cell::Value(Uniform(rng, -4, 12) / (Chance(rng, 0.3) ? 2.0 : 1.0)));
        continue;
      }
      const FormulaAst f = RandomCalcExpr(rng, r, c, opt.max_depth, opt.input_cells);
      calc.set(render_address(c, r), Cell::Formula("=" + serialize_formula(f)));
    }
  }
  return wb;
}

// ---------------------------------------------------------------------------
// Recursive-substitution oracle for the numeric subset (numbers, booleans,
// blanks and errors; arithmetic, comparisons, unary minus, IF, SUM). Each
// referenced cell is evaluated on demand by recursion; there is no graph and
// no ordering.

class SubstitutionOracle {
 public:
  explicit SubstitutionOracle(const Workbook& wb) : wb_(wb) {}

  // Final value of a stored cell; a blank formula result reads as 0.
  CellValue Value(const CellKey& key) {
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Cell* cell = wb_.cell(key);
    CellValue out = Blank{};
    if (cell != nullptr && !cell->has_formula()) {
      out = cell->cached;
    } else if (cell != nullptr) {
      out = Eval(parse_formula(*cell->formula), key.sheet);
      if (std::holds_alternative<Blank>(out)) out = 0.0;
    }
    memo_[key] = out;
    return out;
  }

 private:
  static std::optional<ErrorCode> ErrorOf(const CellValue& v) {
    if (const auto* e = std::get_if<ErrorCode>(&v)) return *e;
    return std::nullopt;
  }

  static double Num(const CellValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* b = std::get_if<bool>(&v)) return *b ? 1 : 0;
    return 0;  // blank
  }

  static int Rank(const CellValue& v, const CellValue& other) {
    const CellValue& t = std::holds_alternative<Blank>(v) ? other : v;
    return std::holds_alternative<bool>(t) ? 2 : 0;
  }

  static int Cmp(const CellValue& a, const CellValue& b) {
    const int ra = Rank(a, b);
    const int rb = Rank(b, a);
    if (ra != rb) return ra < rb ? -1 : 1;
    double x = 0;
    double y = 0;
    if (ra == 2) {
      x = std::holds_alternative<bool>(a) && std::get<bool>(a);
      y = std::holds_alternative<bool>(b) && std::get<bool>(b);
    } else {
      x = Num(a);
      y = Num(b);
    }
    return x < y ? -1 : (x > y ? 1 : 0);
  }

  static CellValue Checked(double d) {
    if (!std::isfinite(d)) return ErrorCode::kValue;
    return d;
  }

  int SheetIndex(const Reference& r, int current) const {
    if (!r.sheet) return current;
    for (std::size_t i = 0; i < wb_.sheets.size(); ++i) {
      if (iequals(wb_.sheets[i].name, *r.sheet)) return static_cast<int>(i);
    }
    return -1;
  }

  CellValue Eval(const FormulaAst& node, int sheet) {
    if (const auto* n = node.as<NumberLit>()) return n->value;
    if (const auto* b = node.as<BoolLit>()) return b->value;
    if (const auto* r = node.as<Reference>()) {
      const int s = SheetIndex(*r, sheet);
      if (s < 0) return ErrorCode::kRef;
      return Value(CellKey{s, r->row, r->col});
    }
    if (const auto* u = node.as<Unary>()) {
      const CellValue v = Eval(*u->operand, sheet);
      if (auto e = ErrorOf(v)) return *e;
      return u->op == UnaryOp::kNeg ? -Num(v) : Num(v);
    }
    if (const auto* b = node.as<Binary>()) {
      const CellValue l = Eval(*b->left, sheet);
      const CellValue r = Eval(*b->right, sheet);
      if (auto e = ErrorOf(l)) return *e;
      if (auto e = ErrorOf(r)) return *e;
      switch (b->op) {
        case BinaryOp::kAdd: return Checked(Num(l) + Num(r));
        case BinaryOp::kSub: return Checked(Num(l) - Num(r));
        case BinaryOp::kMul: return Checked(Num(l) * Num(r));
        case BinaryOp::kDiv:
          if (Num(r) == 0) return ErrorCode::kDiv0;
          return Checked(Num(l) / Num(r));
        case BinaryOp::kEq: return Cmp(l, r) == 0;
        case BinaryOp::kNe: return Cmp(l, r) != 0;
        case BinaryOp::kLt: return Cmp(l, r) < 0;
        case BinaryOp::kLe: return Cmp(l, r) <= 0;
        case BinaryOp::kGt: return Cmp(l, r) > 0;
        case BinaryOp::kGe: return Cmp(l, r) >= 0;
        default: return ErrorCode::kValue;
      }
    }
    const auto* c = node.as<Call>();
    if (c != nullptr && c->name == "IF") {
      const CellValue cond = Eval(c->args[0], sheet);
      if (auto e = ErrorOf(cond)) return *e;
      const bool truth = std::holds_alternative<bool>(cond) ? std::get<bool>(cond) : Num(cond) != 0;
      if (truth) return Eval(c->args[1], sheet);
      if (c->args.size() == 3) return Eval(c->args[2], sheet);
      return false;
    }
    if (c != nullptr && c->name == "SUM") {
      double total = 0;
      std::optional<ErrorCode> error;
      auto take_cell = [&](const CellValue& v) {
        if (const auto* d = std::get_if<double>(&v)) total += *d;
        if (auto e = ErrorOf(v); e && !error) error = e;
      };
      for (const FormulaAst& arg : c->args) {
        if (const auto* rr = arg.as<RangeRef>()) {
          const int s = SheetIndex(rr->start, sheet);
          for (int row = rr->start.row; row <= rr->end.row; ++row) {
            for (int col = rr->start.col; col <= rr->end.col; ++col) {
              if (wb_.cell(CellKey{s, row, col}) != nullptr) take_cell(Value(CellKey{s, row, col}));
            }
          }
        } else if (const auto* r = arg.as<Reference>()) {
          const int s = SheetIndex(*r, sheet);
          if (wb_.cell(CellKey{s, r->row, r->col}) != nullptr) {
            take_cell(Value(CellKey{s, r->row, r->col}));
          }
        } else {
          const CellValue v = Eval(arg, sheet);
          if (auto e = ErrorOf(v)) {
            if (!error) error = e;
          } else {
            total += Num(v);
          }
        }
      }
      if (error) return *error;
      return Checked(total);
    }
    return ErrorCode::kName;
  }

  const Workbook& wb_;
  std::map<CellKey, CellValue> memo_;
};

// ---------------------------------------------------------------------------
// Synthetic workbook for the reference samples: `unique` copy classes spread over exactly
// `formula_cells` formula cells, every class copied to at least two cells.
// Class i fills column i + 2 downward with "=A<row>+i".

inline Workbook SyntheticWorkbook(int unique, int formula_cells) {
  Workbook wb;
  Sheet& s = wb.add_sheet("Model");
  const int base = formula_cells / unique;
  const int extra = formula_cells % unique;
  for (int i = 0; i < unique; ++i) {
    const int rows = base + (i < extra ? 1 : 0);
    const int col = i + 2;
    for (int r = 1; r <= rows; ++r) {
      s.set(render_address(col, r),
            Cell::Formula("=A" + std::to_string(r) + "+" + std::to_string(i),
                          static_cast<double>(i)));
    }
  }
  return wb;
}

}  // namespace sheetsentry::testing

#endif  // SHEETSENTRY_TESTS_TESTING_GENERATORS_H_
