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

#include "sheetsentry/formula.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "sheetsentry/errors.h"

namespace sheetsentry {

namespace {

constexpr int kMaxNesting = 256;

constexpr std::array<std::string_view, 12> kSupportedFunctions = {
    "IF",  "SUM",     "MIN",   "MAX",   "AND",   "OR",
    "NOT", "ABS",     "ROUND", "VLOOKUP", "COUNT", "AVERAGE"};

bool IsAlpha(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}
bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}
bool IsWordStart(char c) { return IsAlpha(c) || c == '_' || c == '$'; }
bool IsWordChar(char c) {
  return IsAlpha(c) || IsDigit(c) || c == '_' || c == '.' || c == '$';
}

// Uppercased A1 reference text when `word` is a reference within bounds.
std::optional<AddressParts> AsReference(std::string_view word) {
  const std::string upper = to_upper(word);
  try {
    return parse_address(upper);
  } catch (const AddressParseError&) {
    return std::nullopt;
  }
}

bool IsBareSheetName(std::string_view name) {
  if (name.empty() || !(IsAlpha(name[0]) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return IsAlpha(c) || IsDigit(c) || c == '_' || c == '.';
  });
}

std::string QuoteSheet(std::string_view name) {
  if (IsBareSheetName(name)) return std::string(name);
  std::string out = "'";
  for (char c : name) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += '\'';
  return out;
}

std::string Unquote(std::string_view lexeme, char quote) {
  std::string out;
  for (std::size_t i = 1; i + 1 < lexeme.size(); ++i) {
    out += lexeme[i];
    if (lexeme[i] == quote) ++i;
  }
  return out;
}

}  // namespace

std::string_view op_text(UnaryOp op) { return op == UnaryOp::kNeg ? "-" : "+"; }

std::string_view op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kMul: return "*";
    case BinaryOp::kDiv: return "/";
    case BinaryOp::kPow: return "^";
    case BinaryOp::kConcat: return "&";
    case BinaryOp::kEq: return "=";
    case BinaryOp::kNe: return "<>";
    case BinaryOp::kLt: return "<";
    case BinaryOp::kLe: return "<=";
    case BinaryOp::kGt: return ">";
    case BinaryOp::kGe: return ">=";
  }
  return "?";
}

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::kNumber: return "number";
    case TokenKind::kString: return "string";
    case TokenKind::kBoolean: return "boolean";
    case TokenKind::kIdent: return "ident";
    case TokenKind::kRef: return "ref";
    case TokenKind::kOp: return "op";
    case TokenKind::kLParen: return "lparen";
    case TokenKind::kRParen: return "rparen";
    case TokenKind::kComma: return "comma";
    case TokenKind::kColon: return "colon";
    case TokenKind::kBang: return "bang";
    case TokenKind::kBracket: return "bracket";
  }
  return "?";
}

bool is_supported_function(std::string_view upper_name) {
  return std::find(kSupportedFunctions.begin(), kSupportedFunctions.end(),
                   upper_name) != kSupportedFunctions.end();
}

namespace ast {

FormulaAst num(double v) { return FormulaAst{NumberLit{v}}; }
FormulaAst text(std::string v) { return FormulaAst{TextLit{std::move(v)}}; }
FormulaAst boolean(bool v) { return FormulaAst{BoolLit{v}}; }

FormulaAst ref(std::string_view a1) {
  const AddressParts p = parse_address(a1);
  return FormulaAst{Reference{std::nullopt, std::nullopt, p.col, p.row,
                              p.abs_col, p.abs_row}};
}

FormulaAst ref(Reference r) { return FormulaAst{std::move(r)}; }

FormulaAst range(std::string_view a1_start, std::string_view a1_end) {
  const FormulaAst s = ref(a1_start);
  const FormulaAst e = ref(a1_end);
  return FormulaAst{RangeRef{*s.as<Reference>(), *e.as<Reference>()}};
}

FormulaAst name(std::string id) { return FormulaAst{Name{to_upper(id)}}; }

FormulaAst call(std::string name, std::vector<FormulaAst> args) {
  return FormulaAst{Call{to_upper(name), std::move(args)}};
}

FormulaAst unary(UnaryOp op, FormulaAst operand) {
  return FormulaAst{Unary{op, std::move(operand)}};
}

FormulaAst binary(BinaryOp op, FormulaAst left, FormulaAst right) {
  return FormulaAst{Binary{op, std::move(left), std::move(right)}};
}

}  // namespace ast

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto emit = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    tokens.push_back(Token{kind, std::string(src.substr(begin, end - begin)), begin});
  };
  while (i < src.size()) {
    const char c = src[i];
    const std::size_t begin = i;
    if (IsSpace(c)) {
      ++i;
      continue;
    }
    if (IsDigit(c) || (c == '.' && i + 1 < src.size() && IsDigit(src[i + 1]))) {
      while (i < src.size() && IsDigit(src[i])) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && IsDigit(src[i])) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && IsDigit(src[j])) {
          i = j;
          while (i < src.size() && IsDigit(src[i])) ++i;
        }
      }
      emit(TokenKind::kNumber, begin, i);
      continue;
    }
    if (c == '"' || c == '\'') {
      ++i;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == c) {
          if (i + 1 < src.size() && src[i + 1] == c) {
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) {
        throw LexError(begin, c == '"' ? "unterminated string literal"
                                       : "unterminated quoted sheet name");
      }
      if (c == '\'' && i - begin == 2) throw LexError(begin, "empty sheet name");
      emit(c == '"' ? TokenKind::kString : TokenKind::kIdent, begin, i);
      continue;
    }
    if (c == '[') {
      const std::size_t close = src.find(']', i + 1);
      if (close == std::string_view::npos) {
        throw LexError(begin, "unterminated workbook reference");
      }
      if (close == i + 1) throw LexError(begin, "empty workbook name");
      i = close + 1;
      emit(TokenKind::kBracket, begin, i);
      continue;
    }
    if (IsWordStart(c)) {
      while (i < src.size() && IsWordChar(src[i])) ++i;
      const std::string_view word = src.substr(begin, i - begin);
      if (AsReference(word)) {
        emit(TokenKind::kRef, begin, i);
        continue;
      }
      if (word.find('$') != std::string_view::npos) {
        throw LexError(begin, "malformed reference '" + std::string(word) + "'");
      }
      std::size_t next = i;
      while (next < src.size() && IsSpace(src[next])) ++next;
      const bool call_follows = next < src.size() && src[next] == '(';
      if (!call_follows && (iequals(word, "TRUE") || iequals(word, "FALSE"))) {
        emit(TokenKind::kBoolean, begin, i);
      } else {
        emit(TokenKind::kIdent, begin, i);
      }
      continue;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^': case '&': case '=':
        ++i;
        emit(TokenKind::kOp, begin, i);
        continue;
      case '<':
        ++i;
        if (i < src.size() && (src[i] == '>' || src[i] == '=')) ++i;
        emit(TokenKind::kOp, begin, i);
        continue;
      case '>':
        ++i;
        if (i < src.size() && src[i] == '=') ++i;
        emit(TokenKind::kOp, begin, i);
        continue;
      case '(': ++i; emit(TokenKind::kLParen, begin, i); continue;
      case ')': ++i; emit(TokenKind::kRParen, begin, i); continue;
      case ',': ++i; emit(TokenKind::kComma, begin, i); continue;
      case ':': ++i; emit(TokenKind::kColon, begin, i); continue;
      case '!': ++i; emit(TokenKind::kBang, begin, i); continue;
      default:
        throw LexError(begin, std::string("unexpected character '") + c + "'");
    }
  }
  return tokens;
}

namespace {

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::size_t end_offset)
      : tokens_(std::move(tokens)), end_offset_(end_offset) {}

  FormulaAst ParseFormula() {
    FormulaAst result = ParseComparison();
    if (!AtEnd()) Fail({"operator", "end of formula"}, "unexpected token");
    return result;
  }

 private:
  bool AtEnd() const { return pos_ >= tokens_.size(); }
  const Token* Peek(std::size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
  }
  bool PeekKind(TokenKind kind, std::size_t ahead = 0) const {
    const Token* t = Peek(ahead);
    return t != nullptr && t->kind == kind;
  }
  bool PeekOp(std::string_view op) const {
    const Token* t = Peek();
    return t != nullptr && t->kind == TokenKind::kOp && t->lexeme == op;
  }
  std::size_t Offset() const {
    return AtEnd() ? end_offset_ : tokens_[pos_].offset;
  }

  [[noreturn]] void Fail(std::vector<std::string> expected,
                         const std::string& what) const {
    std::string message = what;
    if (AtEnd()) {
      message += " at end of formula";
    } else {
      message += " '" + tokens_[pos_].lexeme + "'";
    }
    throw ParseError(Offset(), std::move(expected), message);
  }

  void Expect(TokenKind kind, const char* description) {
    if (!PeekKind(kind)) Fail({description}, "unexpected token");
    ++pos_;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxNesting) {
        parser.Fail({}, "formula nested too deeply");
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  std::optional<BinaryOp> MatchOp(
      std::initializer_list<std::pair<std::string_view, BinaryOp>> ops) {
    const Token* t = Peek();
    if (t == nullptr || t->kind != TokenKind::kOp) return std::nullopt;
    for (const auto& [text, op] : ops) {
      if (t->lexeme == text) {
        ++pos_;
        return op;
      }
    }
    return std::nullopt;
  }

  FormulaAst ParseComparison() {
    FormulaAst left = ParseConcat();
    while (auto op = MatchOp({{"=", BinaryOp::kEq},
                              {"<>", BinaryOp::kNe},
                              {"<", BinaryOp::kLt},
                              {"<=", BinaryOp::kLe},
                              {">", BinaryOp::kGt},
                              {">=", BinaryOp::kGe}})) {
      left = ast::binary(*op, std::move(left), ParseConcat());
    }
    return left;
  }

  FormulaAst ParseConcat() {
    FormulaAst left = ParseAdditive();
    while (auto op = MatchOp({{"&", BinaryOp::kConcat}})) {
      left = ast::binary(*op, std::move(left), ParseAdditive());
    }
    return left;
  }

  FormulaAst ParseAdditive() {
    FormulaAst left = ParseTerm();
    while (auto op = MatchOp({{"+", BinaryOp::kAdd}, {"-", BinaryOp::kSub}})) {
      left = ast::binary(*op, std::move(left), ParseTerm());
    }
    return left;
  }

  FormulaAst ParseTerm() {
    FormulaAst left = ParsePower();
    while (auto op = MatchOp({{"*", BinaryOp::kMul}, {"/", BinaryOp::kDiv}})) {
      left = ast::binary(*op, std::move(left), ParsePower());
    }
    return left;
  }

  FormulaAst ParsePower() {
    DepthGuard guard(*this);
    FormulaAst base = ParseUnary();
    if (MatchOp({{"^", BinaryOp::kPow}})) {
      return ast::binary(BinaryOp::kPow, std::move(base), ParsePower());
    }
    return base;
  }

  FormulaAst ParseUnary() {
    DepthGuard guard(*this);
    if (PeekOp("-")) {
      ++pos_;
      return ast::unary(UnaryOp::kNeg, ParseUnary());
    }
    if (PeekOp("+")) {
      ++pos_;
      return ast::unary(UnaryOp::kPlus, ParseUnary());
    }
    return ParsePrimary();
  }

  static bool IsSheetToken(const Token& t) {
    return t.kind == TokenKind::kIdent || t.kind == TokenKind::kRef ||
           t.kind == TokenKind::kBoolean;
  }

  static std::string SheetName(const Token& t) {
    if (!t.lexeme.empty() && t.lexeme[0] == '\'') return Unquote(t.lexeme, '\'');
    return t.lexeme;
  }

  Reference ParseCellRef(const std::optional<std::string>& external,
                         const std::optional<std::string>& sheet) {
    if (!PeekKind(TokenKind::kRef)) Fail({"cell reference"}, "unexpected token");
    const AddressParts p = *AsReference(tokens_[pos_].lexeme);
    ++pos_;
    return Reference{external, sheet, p.col, p.row, p.abs_col, p.abs_row};
  }

  FormulaAst ParseReference() {
    std::optional<std::string> external;
    std::optional<std::string> sheet;
    if (PeekKind(TokenKind::kBracket)) {
      const std::string& lexeme = tokens_[pos_].lexeme;
      external = lexeme.substr(1, lexeme.size() - 2);
      ++pos_;
      if (!(Peek() != nullptr && IsSheetToken(*Peek()) &&
            PeekKind(TokenKind::kBang, 1))) {
        Fail({"sheet name"}, "external reference needs a sheet");
      }
    }
    if (Peek() != nullptr && IsSheetToken(*Peek()) &&
        PeekKind(TokenKind::kBang, 1)) {
      sheet = SheetName(tokens_[pos_]);
      pos_ += 2;
    }
    Reference start = ParseCellRef(external, sheet);
    if (!PeekKind(TokenKind::kColon)) return ast::ref(std::move(start));
    ++pos_;
    if (Peek() != nullptr && IsSheetToken(*Peek()) &&
        PeekKind(TokenKind::kBang, 1)) {
      const std::string second = SheetName(tokens_[pos_]);
      if (!sheet || !iequals(second, *sheet)) {
        Fail({"cell reference"}, "range corners on different sheets");
      }
      pos_ += 2;
    }
    Reference end = ParseCellRef(external, sheet);
    if (start.col > end.col) {
      std::swap(start.col, end.col);
      std::swap(start.abs_col, end.abs_col);
    }
    if (start.row > end.row) {
      std::swap(start.row, end.row);
      std::swap(start.abs_row, end.abs_row);
    }
    return FormulaAst{RangeRef{std::move(start), std::move(end)}};
  }

  FormulaAst ParseCall() {
    std::string name = to_upper(tokens_[pos_].lexeme);
    pos_ += 2;  // name and "("
    std::vector<FormulaAst> args;
    if (PeekKind(TokenKind::kRParen)) {
      ++pos_;
      return ast::call(std::move(name), std::move(args));
    }
    while (true) {
      args.push_back(ParseComparison());
      if (PeekKind(TokenKind::kComma)) {
        ++pos_;
        continue;
      }
      if (PeekKind(TokenKind::kRParen)) {
        ++pos_;
        break;
      }
      Fail({",", ")"}, "unexpected token in argument list");
    }
    return ast::call(std::move(name), std::move(args));
  }

  FormulaAst ParsePrimary() {
    const Token* t = Peek();
    if (t == nullptr) {
      Fail({"number", "string", "boolean", "reference", "function", "name",
            "opening parenthesis"},
           "expected an operand");
    }
    switch (t->kind) {
      case TokenKind::kNumber: {
        double value = 0;
        const std::string& s = t->lexeme;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size() ||
            !std::isfinite(value)) {
          Fail({"number"}, "invalid number");
        }
        ++pos_;
        return ast::num(value);
      }
      case TokenKind::kString: {
        std::string value = Unquote(t->lexeme, '"');
        ++pos_;
        return ast::text(std::move(value));
      }
      case TokenKind::kLParen: {
        ++pos_;
        FormulaAst inner = ParseComparison();
        Expect(TokenKind::kRParen, ")");
        return inner;
      }
      case TokenKind::kBracket:
        return ParseReference();
      case TokenKind::kBoolean:
        if (PeekKind(TokenKind::kBang, 1)) return ParseReference();
        ++pos_;
        return ast::boolean(iequals(t->lexeme, "TRUE"));
      case TokenKind::kRef:
        if (PeekKind(TokenKind::kLParen, 1)) return ParseCall();
        return ParseReference();
      case TokenKind::kIdent:
        if (PeekKind(TokenKind::kBang, 1)) return ParseReference();
        if (t->lexeme[0] == '\'') Fail({"!"}, "quoted sheet name without '!'");
        if (PeekKind(TokenKind::kLParen, 1)) return ParseCall();
        ++pos_;
        return ast::name(t->lexeme);
      default:
        Fail({"number", "string", "boolean", "reference", "function", "name",
              "opening parenthesis"},
             "unexpected token");
    }
  }

  std::vector<Token> tokens_;
  std::size_t end_offset_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

FormulaAst ParseWithCount(std::string_view src, std::size_t* token_count) {
  if (src.empty() || src[0] != '=') {
    throw ParseError(0, {"="}, "formula must start with '='");
  }
  std::vector<Token> tokens;
  try {
    tokens = tokenize(src.substr(1));
  } catch (const LexError& e) {
    throw ParseError(e.offset() + 1, {}, e.what());
  }
  if (tokens.empty()) {
    throw ParseError(src.size(), {"expression"}, "empty formula");
  }
  for (Token& t : tokens) t.offset += 1;
  if (token_count != nullptr) *token_count = tokens.size();
  return Parser(std::move(tokens), src.size()).ParseFormula();
}

// Binding strength, low to high; atoms are strongest.
int Precedence(const FormulaAst& node) {
  if (const auto* b = node.as<Binary>()) {
    switch (b->op) {
      case BinaryOp::kEq: case BinaryOp::kNe: case BinaryOp::kLt:
      case BinaryOp::kLe: case BinaryOp::kGt: case BinaryOp::kGe:
        return 1;
      case BinaryOp::kConcat: return 2;
      case BinaryOp::kAdd: case BinaryOp::kSub: return 3;
      case BinaryOp::kMul: case BinaryOp::kDiv: return 4;
      case BinaryOp::kPow: return 5;
    }
  }
  if (node.is<Unary>()) return 6;
  return 7;
}

void Serialize(const FormulaAst& node, const ReferenceRenderer& renderer,
               std::string& out);

void SerializeChild(const FormulaAst& child, bool parens,
                    const ReferenceRenderer& renderer, std::string& out) {
  if (parens) out += '(';
  Serialize(child, renderer, out);
  if (parens) out += ')';
}

void Serialize(const FormulaAst& node, const ReferenceRenderer& renderer,
               std::string& out) {
  if (const auto* n = node.as<NumberLit>()) {
    out += format_number(n->value);
  } else if (const auto* s = node.as<TextLit>()) {
    out += '"';
    for (char c : s->value) {
      out += c;
      if (c == '"') out += '"';
    }
    out += '"';
  } else if (const auto* b = node.as<BoolLit>()) {
    out += b->value ? "TRUE" : "FALSE";
  } else if (const auto* r = node.as<Reference>()) {
    out += renderer.cell(*r);
  } else if (const auto* rr = node.as<RangeRef>()) {
    out += renderer.range(*rr);
  } else if (const auto* nm = node.as<Name>()) {
    out += nm->id;
  } else if (const auto* c = node.as<Call>()) {
    out += c->name;
    out += '(';
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      if (i > 0) out += ',';
      Serialize(c->args[i], renderer, out);
    }
    out += ')';
  } else if (const auto* u = node.as<Unary>()) {
    out += op_text(u->op);
    SerializeChild(*u->operand, Precedence(*u->operand) < 6, renderer, out);
  } else if (const auto* bin = node.as<Binary>()) {
    const int prec = Precedence(node);
    const int lp = Precedence(*bin->left);
    const int rp = Precedence(*bin->right);
    const bool right_assoc = bin->op == BinaryOp::kPow;
    SerializeChild(*bin->left, right_assoc ? lp <= prec : lp < prec, renderer,
                   out);
    out += op_text(bin->op);
    SerializeChild(*bin->right, right_assoc ? rp < prec : rp <= prec, renderer,
                   out);
  }
}

void Visit(const FormulaAst& node,
           const std::function<void(const FormulaAst&)>& fn) {
  fn(node);
  if (const auto* c = node.as<Call>()) {
    for (const FormulaAst& arg : c->args) Visit(arg, fn);
  } else if (const auto* u = node.as<Unary>()) {
    Visit(*u->operand, fn);
  } else if (const auto* b = node.as<Binary>()) {
    Visit(*b->left, fn);
    Visit(*b->right, fn);
  }
}

}  // namespace

FormulaAst parse_formula(std::string_view src) {
  return ParseWithCount(src, nullptr);
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string qualifier_text(const Reference& r) {
  std::string out;
  if (r.external) out += "[" + *r.external + "]";
  if (r.sheet) out += QuoteSheet(*r.sheet) + "!";
  return out;
}

std::string serialize_formula(const FormulaAst& ast,
                              const ReferenceRenderer& renderer) {
  std::string out;
  Serialize(ast, renderer, out);
  return out;
}

std::string serialize_formula(const FormulaAst& ast) {
  static const ReferenceRenderer kA1{
      [](const Reference& r) {
        return qualifier_text(r) +
               render_address({r.col, r.row, r.abs_col, r.abs_row});
      },
      [](const RangeRef& rr) {
        return qualifier_text(rr.start) +
               render_address({rr.start.col, rr.start.row, rr.start.abs_col,
                               rr.start.abs_row}) +
               ":" +
               render_address(
                   {rr.end.col, rr.end.row, rr.end.abs_col, rr.end.abs_row});
      }};
  return serialize_formula(ast, kA1);
}

void visit_nodes(const FormulaAst& ast,
                 const std::function<void(const FormulaAst&)>& fn) {
  Visit(ast, fn);
}

std::vector<AnyReference> collect_references(const FormulaAst& ast) {
  std::vector<AnyReference> refs;
  Visit(ast, [&](const FormulaAst& node) {
    if (const auto* r = node.as<Reference>()) {
      refs.emplace_back(*r);
    } else if (const auto* rr = node.as<RangeRef>()) {
      refs.emplace_back(*rr);
    }
  });
  return refs;
}

std::vector<ParsedFormula> parse_all(const Workbook& wb) {
  std::vector<ParsedFormula> out;
  for (std::size_t s = 0; s < wb.sheets.size(); ++s) {
    for (const auto& [pos, cell] : wb.sheets[s].cells) {
      if (!cell.formula) continue;
      const CellKey key{static_cast<int>(s), pos.row, pos.col};
      ParsedFormula pf{key, FormulaAst{}, 0};
      try {
        pf.ast = ParseWithCount(*cell.formula, &pf.token_count);
      } catch (const ParseError& e) {
        throw ParseError(to_string(wb.address_of(key)), e);
      }
      out.push_back(std::move(pf));
    }
  }
  return out;
}

}  // namespace sheetsentry
