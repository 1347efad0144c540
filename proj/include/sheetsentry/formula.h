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

#ifndef SHEETSENTRY_FORMULA_H_
#define SHEETSENTRY_FORMULA_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sheetsentry/workbook.h"

namespace sheetsentry {

// Heap-allocated value with deep-copy semantics; lets the AST variant be
// recursive while staying a regular value type.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(std::make_unique<T>(*other)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a == *b; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Reference {
  std::optional<std::string> external;  // workbook name, without brackets
  std::optional<std::string> sheet;
  int col = 1;
  int row = 1;
  bool abs_col = false;
  bool abs_row = false;

  bool is_external() const { return external.has_value(); }

  friend bool operator==(const Reference&, const Reference&) = default;
};

// Rectangular range; both corners carry the same sheet/external qualifier and
// start is the top-left corner.
struct RangeRef {
  Reference start;
  Reference end;

  int rows() const { return end.row - start.row + 1; }
  int cols() const { return end.col - start.col + 1; }
  std::uint64_t cell_count() const {
    return static_cast<std::uint64_t>(rows()) *
           static_cast<std::uint64_t>(cols());
  }

  friend bool operator==(const RangeRef&, const RangeRef&) = default;
};

enum class UnaryOp { kNeg, kPlus };

enum class BinaryOp {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kConcat,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
};

std::string_view op_text(UnaryOp op);
std::string_view op_text(BinaryOp op);

struct FormulaAst;

struct NumberLit {
  double value = 0;  // nonnegative; signs are Unary nodes
  friend bool operator==(const NumberLit&, const NumberLit&) = default;
};
struct TextLit {
  std::string value;
  friend bool operator==(const TextLit&, const TextLit&) = default;
};
struct BoolLit {
  bool value = false;
  friend bool operator==(const BoolLit&, const BoolLit&) = default;
};
// Bare identifier that is neither a reference nor a call, e.g. a named range.
// Stored uppercase; always evaluates to #NAME?.
struct Name {
  std::string id;
  friend bool operator==(const Name&, const Name&) = default;
};
struct Call {
  std::string name;  // uppercase
  std::vector<FormulaAst> args;
  friend bool operator==(const Call&, const Call&);
};
struct Unary {
  UnaryOp op;
  Box<FormulaAst> operand;
  friend bool operator==(const Unary&, const Unary&) = default;
};
struct Binary {
  BinaryOp op;
  Box<FormulaAst> left;
  Box<FormulaAst> right;
  friend bool operator==(const Binary&, const Binary&) = default;
};

struct FormulaAst {
  using Node = std::variant<NumberLit, TextLit, BoolLit, Reference, RangeRef,
                            Name, Call, Unary, Binary>;
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }

  friend bool operator==(const FormulaAst&, const FormulaAst&) = default;
};

inline bool operator==(const Call& a, const Call& b) {
  return a.name == b.name && a.args == b.args;
}

// Convenience constructors, mostly for tests and generators.
namespace ast {
FormulaAst num(double v);
FormulaAst text(std::string v);
FormulaAst boolean(bool v);
FormulaAst ref(std::string_view a1);  // "B2", "$C$1"
FormulaAst ref(Reference r);
FormulaAst range(std::string_view a1_start, std::string_view a1_end);
FormulaAst name(std::string id);
FormulaAst call(std::string name, std::vector<FormulaAst> args);
FormulaAst unary(UnaryOp op, FormulaAst operand);
FormulaAst binary(BinaryOp op, FormulaAst left, FormulaAst right);
}  // namespace ast

enum class TokenKind {
  kNumber,
  kString,
  kBoolean,
  kIdent,
  kRef,
  kOp,
  kLParen,
  kRParen,
  kComma,
  kColon,
  kBang,
  kBracket,
};

std::string_view token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string lexeme;  // raw source text, including quotes or brackets
  std::size_t offset;  // into the tokenized text

  friend bool operator==(const Token&, const Token&) = default;
};

// Splits formula text (without the leading "=") into tokens. Whitespace
// outside string literals is dropped. Throws LexError.
std::vector<Token> tokenize(std::string_view src);

// Parses formula text beginning with "=". Throws LexError or ParseError;
// offsets are relative to `src`, including the "=".
FormulaAst parse_formula(std::string_view src);

// Canonical A1 text without the leading "=", with minimal parentheses.
std::string serialize_formula(const FormulaAst& ast);

// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

// Renders references; the normalizer swaps in an origin-relative renderer.
struct ReferenceRenderer {
  std::function<std::string(const Reference&)> cell;
  std::function<std::string(const RangeRef&)> range;
};
std::string serialize_formula(const FormulaAst& ast,
                              const ReferenceRenderer& renderer);

// Sheet/workbook prefix as written in A1 text: "", "Sheet2!", "'My Sheet'!",
// "[Rates]S1!".
std::string qualifier_text(const Reference& r);

using AnyReference = std::variant<Reference, RangeRef>;

// All Reference and RangeRef nodes in source order.
std::vector<AnyReference> collect_references(const FormulaAst& ast);

// Functions with evaluation support. Others parse but evaluate to #NAME?.
bool is_supported_function(std::string_view upper_name);

// Calls `fn` on every node, parents before children, left to right.
void visit_nodes(const FormulaAst& ast,
                 const std::function<void(const FormulaAst&)>& fn);

// Every formula cell of a workbook, parsed once for the analysis passes.
struct ParsedFormula {
  CellKey cell;
  FormulaAst ast;
  std::size_t token_count = 0;
};

// In CellKey order. A syntax error is rethrown as ParseError naming the cell.
std::vector<ParsedFormula> parse_all(const Workbook& wb);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_FORMULA_H_
