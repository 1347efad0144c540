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

#include "sheetsentry/workbook.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sheetsentry/errors.h"
#include "sheetsentry/formula.h"

namespace sheetsentry {

using json = nlohmann::json;

namespace {

bool IsUpperAlpha(char c) { return c >= 'A' && c <= 'Z'; }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) ==
                  std::toupper(static_cast<unsigned char>(y));
         });
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string column_letters(int col) {
  std::string out;
  while (col > 0) {
    const int rem = (col - 1) % 26;
    out.insert(out.begin(), static_cast<char>('A' + rem));
    col = (col - 1) / 26;
  }
  return out;
}

std::optional<int> column_index(std::string_view letters) {
  if (letters.empty() || letters.size() > 3) return std::nullopt;
  int col = 0;
  for (char c : letters) {
    if (!IsUpperAlpha(c)) return std::nullopt;
    col = col * 26 + (c - 'A' + 1);
  }
  if (col > kMaxColumn) return std::nullopt;
  return col;
}

AddressParts parse_address(std::string_view text) {
  AddressParts parts;
  std::size_t i = 0;
  if (i < text.size() && text[i] == '$') {
    parts.abs_col = true;
    ++i;
  }
  const std::size_t letters_begin = i;
  while (i < text.size() && IsUpperAlpha(text[i])) ++i;
  const auto col = column_index(text.substr(letters_begin, i - letters_begin));
  if (!col) throw AddressParseError(std::string(text));
  parts.col = *col;
  if (i < text.size() && text[i] == '$') {
    parts.abs_row = true;
    ++i;
  }
  const std::size_t digits_begin = i;
  if (i >= text.size() || text[i] == '0') throw AddressParseError(std::string(text));
  while (i < text.size() && IsDigit(text[i])) ++i;
  if (i != text.size() || i - digits_begin > 7) {
    throw AddressParseError(std::string(text));
  }
  int row = 0;
  std::from_chars(text.data() + digits_begin, text.data() + i, row);
  if (row > kMaxRow) throw AddressParseError(std::string(text));
  parts.row = row;
  return parts;
}

std::string render_address(const AddressParts& parts) {
  std::string out;
  if (parts.abs_col) out += '$';
  out += column_letters(parts.col);
  if (parts.abs_row) out += '$';
  out += std::to_string(parts.row);
  return out;
}

std::string render_address(int col, int row) {
  return column_letters(col) + std::to_string(row);
}

std::string to_string(const CellAddress& address) {
  return address.sheet + "!" + render_address(address.col, address.row);
}

std::string_view error_code_text(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDiv0:
      return "#DIV/0!";
    case ErrorCode::kRef:
      return "#REF!";
    case ErrorCode::kValue:
      return "#VALUE!";
    case ErrorCode::kNA:
      return "#N/A";
    case ErrorCode::kName:
      return "#NAME?";
    case ErrorCode::kCirc:
      return "#CIRC!";
  }
  return "#VALUE!";
}

std::optional<ErrorCode> parse_error_code(std::string_view text) {
  for (ErrorCode code : {ErrorCode::kDiv0, ErrorCode::kRef, ErrorCode::kValue,
                         ErrorCode::kNA, ErrorCode::kName, ErrorCode::kCirc}) {
    if (error_code_text(code) == text) return code;
  }
  return std::nullopt;
}

std::string display_value(const CellValue& v) {
  struct Visitor {
    std::string operator()(Blank) const { return ""; }
    std::string operator()(double d) const {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.15g", d);
      return buf;
    }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
    std::string operator()(ErrorCode e) const {
      return std::string(error_code_text(e));
    }
  };
  return std::visit(Visitor{}, v);
}

void Sheet::set(std::string_view a1, Cell cell) {
  const AddressParts parts = parse_address(a1);
  const GridPos pos{parts.row, parts.col};
  if (!cell.has_formula() && is_blank(cell.cached)) {
    cells.erase(pos);
    return;
  }
  cells[pos] = std::move(cell);
}

const Cell* Sheet::find(GridPos pos) const {
  auto it = cells.find(pos);
  return it == cells.end() ? nullptr : &it->second;
}

Sheet& Workbook::add_sheet(std::string name) {
  if (name.empty()) throw ValidationError("sheet name must be nonempty");
  if (find_sheet(name)) {
    throw ValidationError("duplicate sheet name '" + name + "'");
  }
  sheets.push_back(Sheet{std::move(name), {}});
  return sheets.back();
}

std::optional<int> Workbook::find_sheet(std::string_view name) const {
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    if (iequals(sheets[i].name, name)) return static_cast<int>(i);
  }
  return std::nullopt;
}

const Cell* Workbook::cell(const CellKey& key) const {
  if (key.sheet < 0 || key.sheet >= static_cast<int>(sheets.size())) {
    return nullptr;
  }
  return sheets[key.sheet].find(GridPos{key.row, key.col});
}

std::optional<CellKey> Workbook::key_of(const CellAddress& address) const {
  const auto sheet = find_sheet(address.sheet);
  if (!sheet) return std::nullopt;
  return CellKey{*sheet, address.row, address.col};
}

CellAddress Workbook::address_of(const CellKey& key) const {
  return CellAddress{sheets.at(key.sheet).name, key.col, key.row};
}

namespace {

std::string JoinPath(const std::string& base, const std::string& token) {
  std::string escaped;
  for (char c : token) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return base + "/" + escaped;
}

std::string JoinPath(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

const char* TypeName(const json& j) { return j.type_name(); }

void ExpectType(const json& j, json::value_t type, const std::string& path,
                const char* expected) {
  if (j.type() != type) {
    throw FormatError(path, std::string("expected ") + expected + ", got " +
                                TypeName(j));
  }
}

void RejectUnknownKeys(const json& j, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw FormatError(JoinPath(path, it.key()), "unknown key");
    }
  }
}

std::optional<std::string> OptionalString(const json& obj, const char* key,
                                          const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  ExpectType(*it, json::value_t::string, JoinPath(path, key), "string");
  return it->get<std::string>();
}

CellValue ValueFromJson(const json& v, const std::string& path) {
  switch (v.type()) {
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw FormatError(path, "number is not finite");
      return d;
    }
    case json::value_t::string:
      return v.get<std::string>();
    case json::value_t::boolean:
      return v.get<bool>();
    case json::value_t::object: {
      RejectUnknownKeys(v, path, {"err"});
      auto it = v.find("err");
      if (it == v.end()) throw FormatError(path, "missing key 'err'");
      ExpectType(*it, json::value_t::string, JoinPath(path, "err"), "string");
      const auto code = parse_error_code(it->get<std::string>());
      if (!code) {
        throw FormatError(JoinPath(path, "err"),
                          "unknown error code '" + it->get<std::string>() + "'");
      }
      return *code;
    }
    case json::value_t::null:
      return Blank{};
    default:
      throw FormatError(path, std::string("unsupported value type ") +
                                  TypeName(v));
  }
}

json ValueToJson(const CellValue& v) {
  struct Visitor {
    json operator()(Blank) const { return nullptr; }
    json operator()(double d) const { return d; }
    json operator()(const std::string& s) const { return s; }
    json operator()(bool b) const { return b; }
    json operator()(ErrorCode e) const {
      return json{{"err", std::string(error_code_text(e))}};
    }
  };
  return std::visit(Visitor{}, v);
}

Cell CellFromJson(const json& j, const std::string& path) {
  ExpectType(j, json::value_t::object, path, "object");
  RejectUnknownKeys(j, path, {"f", "v"});
  Cell cell;
  if (auto f = OptionalString(j, "f", path)) {
    if (f->empty() || (*f)[0] != '=') {
      throw FormatError(JoinPath(path, "f"), "formula must start with '='");
    }
    if (f->find_first_not_of(" \t\r\n", 1) == std::string::npos) {
      throw FormatError(JoinPath(path, "f"), "formula is empty after '='");
    }
    cell.formula = std::move(*f);
  }
  if (auto it = j.find("v"); it != j.end()) {
    cell.cached = ValueFromJson(*it, JoinPath(path, "v"));
  }
  return cell;
}

Workbook WorkbookFromJson(const json& root) {
  const std::string path;
  ExpectType(root, json::value_t::object, path, "object");
  RejectUnknownKeys(root, path, {"manifest", "settings", "sheets", "scripts"});
  Workbook wb;

  if (auto it = root.find("manifest"); it != root.end() && !it->is_null()) {
    const std::string mpath = JoinPath(path, "manifest");
    ExpectType(*it, json::value_t::object, mpath, "object");
    RejectUnknownKeys(*it, mpath, {"title", "specification", "assumptions"});
    wb.manifest.title = OptionalString(*it, "title", mpath);
    wb.manifest.specification = OptionalString(*it, "specification", mpath);
    if (auto a = it->find("assumptions"); a != it->end() && !a->is_null()) {
      const std::string apath = JoinPath(mpath, "assumptions");
      ExpectType(*a, json::value_t::object, apath, "object");
      for (auto kv = a->begin(); kv != a->end(); ++kv) {
        ExpectType(kv.value(), json::value_t::string, JoinPath(apath, kv.key()),
                   "string");
        wb.manifest.assumptions[kv.key()] = kv.value().get<std::string>();
      }
    }
  }

  if (auto it = root.find("settings"); it != root.end() && !it->is_null()) {
    const std::string spath = JoinPath(path, "settings");
    ExpectType(*it, json::value_t::object, spath, "object");
    RejectUnknownKeys(*it, spath, {"calc_mode"});
    if (auto mode = OptionalString(*it, "calc_mode", spath)) {
      if (*mode == "automatic") {
        wb.settings.calc_mode = CalcMode::kAutomatic;
      } else if (*mode == "manual") {
        wb.settings.calc_mode = CalcMode::kManual;
      } else {
        throw FormatError(JoinPath(spath, "calc_mode"),
                          "expected \"automatic\" or \"manual\"");
      }
    }
  }

  auto sheets = root.find("sheets");
  if (sheets == root.end()) throw FormatError(path, "missing key 'sheets'");
  const std::string shpath = JoinPath(path, "sheets");
  ExpectType(*sheets, json::value_t::array, shpath, "array");
  if (sheets->empty()) throw FormatError(shpath, "sheet list is empty");
  for (std::size_t i = 0; i < sheets->size(); ++i) {
    const json& sj = (*sheets)[i];
    const std::string sp = JoinPath(shpath, i);
    ExpectType(sj, json::value_t::object, sp, "object");
    RejectUnknownKeys(sj, sp, {"name", "cells"});
    auto name = OptionalString(sj, "name", sp);
    if (!name || name->empty()) {
      throw FormatError(JoinPath(sp, "name"), "sheet name must be a nonempty string");
    }
    Sheet& sheet = wb.add_sheet(std::move(*name));
    auto cells = sj.find("cells");
    if (cells == sj.end() || cells->is_null()) continue;
    const std::string cpath = JoinPath(sp, "cells");
    ExpectType(*cells, json::value_t::object, cpath, "object");
    for (auto kv = cells->begin(); kv != cells->end(); ++kv) {
      const std::string cellpath = JoinPath(cpath, kv.key());
      AddressParts parts;
      try {
        parts = parse_address(kv.key());
      } catch (const AddressParseError&) {
        throw FormatError(cellpath, "invalid cell address '" + kv.key() + "'");
      }
      if (parts.abs_col || parts.abs_row) {
        throw FormatError(cellpath, "cell keys must not carry '$'");
      }
      Cell cell = CellFromJson(kv.value(), cellpath);
      if (!cell.has_formula() && is_blank(cell.cached)) continue;
      sheet.cells[GridPos{parts.row, parts.col}] = std::move(cell);
    }
  }

  if (auto it = root.find("scripts"); it != root.end() && !it->is_null()) {
    const std::string scpath = JoinPath(path, "scripts");
    ExpectType(*it, json::value_t::array, scpath, "array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& mj = (*it)[i];
      const std::string mp = JoinPath(scpath, i);
      ExpectType(mj, json::value_t::object, mp, "object");
      RejectUnknownKeys(mj, mp, {"name", "source"});
      auto name = OptionalString(mj, "name", mp);
      if (!name) throw FormatError(JoinPath(mp, "name"), "missing script name");
      for (const ScriptModule& existing : wb.scripts) {
        if (existing.name == *name) {
          throw ValidationError("duplicate script module name '" + *name + "'");
        }
      }
      wb.scripts.push_back(
          ScriptModule{std::move(*name), OptionalString(mj, "source", mp).value_or("")});
    }
  }
  return wb;
}

}  // namespace

void validate_workbook(const Workbook& wb) {
  if (wb.sheets.empty()) throw ValidationError("workbook has no sheets");
  for (std::size_t i = 0; i < wb.sheets.size(); ++i) {
    if (wb.sheets[i].name.empty()) {
      throw ValidationError("sheet name must be nonempty");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (iequals(wb.sheets[i].name, wb.sheets[j].name)) {
        throw ValidationError("duplicate sheet name '" + wb.sheets[i].name + "'");
      }
    }
  }
  for (const ParsedFormula& pf : parse_all(wb)) {
    for (const AnyReference& any : collect_references(pf.ast)) {
      const Reference& r = std::holds_alternative<Reference>(any)
                               ? std::get<Reference>(any)
                               : std::get<RangeRef>(any).start;
      if (r.is_external() || !r.sheet) continue;
      if (!wb.find_sheet(*r.sheet)) {
        throw ValidationError(to_string(wb.address_of(pf.cell)) +
                              ": reference to unknown sheet '" + *r.sheet + "'");
      }
    }
  }
}

Workbook parse_workbook(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what());
  }
  Workbook wb = WorkbookFromJson(root);
  validate_workbook(wb);
  return wb;
}

Workbook load_workbook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return parse_workbook(buf.str());
}

std::string dump_workbook(const Workbook& wb) {
  json root = json::object();
  json manifest = json::object();
  if (wb.manifest.title) manifest["title"] = *wb.manifest.title;
  if (wb.manifest.specification) {
    manifest["specification"] = *wb.manifest.specification;
  }
  if (!wb.manifest.assumptions.empty()) {
    manifest["assumptions"] = wb.manifest.assumptions;
  }
  root["manifest"] = std::move(manifest);
  root["settings"] = {{"calc_mode", wb.settings.calc_mode == CalcMode::kManual
                                        ? "manual"
                                        : "automatic"}};
  json sheets = json::array();
  for (const Sheet& sheet : wb.sheets) {
    json cells = json::object();
    for (const auto& [pos, cell] : sheet.cells) {
      json cj = json::object();
      if (cell.formula) cj["f"] = *cell.formula;
      if (!is_blank(cell.cached)) cj["v"] = ValueToJson(cell.cached);
      cells[render_address(pos.col, pos.row)] = std::move(cj);
    }
    sheets.push_back({{"name", sheet.name}, {"cells", std::move(cells)}});
  }
  root["sheets"] = std::move(sheets);
  json scripts = json::array();
  for (const ScriptModule& m : wb.scripts) {
    scripts.push_back({{"name", m.name}, {"source", m.source}});
  }
  root["scripts"] = std::move(scripts);
  return root.dump(2);
}

std::size_t formula_cells(const Workbook& wb) {
  std::size_t n = 0;
  for (const Sheet& sheet : wb.sheets) {
    for (const auto& [pos, cell] : sheet.cells) n += cell.has_formula();
  }
  return n;
}

std::size_t value_cells(const Workbook& wb) {
  return stored_cells(wb) - formula_cells(wb);
}

std::size_t stored_cells(const Workbook& wb) {
  std::size_t n = 0;
  for (const Sheet& sheet : wb.sheets) n += sheet.cells.size();
  return n;
}

}  // namespace sheetsentry
