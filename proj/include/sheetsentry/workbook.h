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

#ifndef SHEETSENTRY_WORKBOOK_H_
#define SHEETSENTRY_WORKBOOK_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sheetsentry {

// Hard validation bounds: three column letters (ZZZ) and 2^20 rows.
inline constexpr int kMaxColumn = 18278;
inline constexpr int kMaxRow = 1 << 20;

struct AddressParts {
  int col = 1;
  int row = 1;
  bool abs_col = false;
  bool abs_row = false;

  friend bool operator==(const AddressParts&, const AddressParts&) = default;
};

// Parses an A1-style address such as "B7" or "$AA$10". Column letters must be
// uppercase. Throws AddressParseError on malformed or out-of-bounds input.
AddressParts parse_address(std::string_view text);

std::string render_address(const AddressParts& parts);
std::string render_address(int col, int row);

// Bijective base-26 column name: 1 -> "A", 26 -> "Z", 27 -> "AA".
std::string column_letters(int col);

// Inverse of column_letters for uppercase letters; nullopt when the result
// would exceed kMaxColumn or the input is not all A-Z.
std::optional<int> column_index(std::string_view letters);

// Case-insensitive ASCII comparison, used for sheet, workbook and function
// names throughout.
bool iequals(std::string_view a, std::string_view b);
std::string to_upper(std::string_view s);

// Human-facing cell location. Sheet names compare case-insensitively inside
// a workbook; the stored spelling is kept for display.
struct CellAddress {
  std::string sheet;
  int col = 1;
  int row = 1;

  friend bool operator==(const CellAddress&, const CellAddress&) = default;
};

// "Sheet1!B3"
std::string to_string(const CellAddress& address);

// Compact cell identity: sheet index within the workbook, then row, then
// column. The derived ordering (sheet order, row, column) is the canonical
// deterministic order used by every module.
struct CellKey {
  int sheet = 0;
  int row = 1;
  int col = 1;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

enum class ErrorCode { kDiv0, kRef, kValue, kNA, kName, kCirc };

std::string_view error_code_text(ErrorCode code);
std::optional<ErrorCode> parse_error_code(std::string_view text);

struct Blank {
  friend bool operator==(Blank, Blank) { return true; }
};

// Number, Text, Boolean, ErrorCode or Blank.
using CellValue = std::variant<Blank, double, std::string, bool, ErrorCode>;

inline bool is_blank(const CellValue& v) {
  return std::holds_alternative<Blank>(v);
}
inline bool is_number(const CellValue& v) {
  return std::holds_alternative<double>(v);
}
inline bool is_error(const CellValue& v) {
  return std::holds_alternative<ErrorCode>(v);
}

// Display form: numbers with up to 15 significant digits, booleans as
// TRUE/FALSE, errors by code, blank as "".
std::string display_value(const CellValue& v);

struct Cell {
  std::optional<std::string> formula;  // begins with "=" when present
  CellValue cached;

  bool has_formula() const { return formula.has_value(); }

  static Cell Formula(std::string text, CellValue cached = Blank{}) {
    return Cell{std::move(text), std::move(cached)};
  }
  static Cell Value(CellValue value) {
    return Cell{std::nullopt, std::move(value)};
  }

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct GridPos {
  int row = 1;
  int col = 1;

  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

struct Sheet {
  std::string name;
  std::map<GridPos, Cell> cells;  // sparse; blank cells are absent

  // Stores `cell` at the A1 address. Storing a formula-less blank erases.
  void set(std::string_view a1, Cell cell);
  const Cell* find(GridPos pos) const;

  friend bool operator==(const Sheet&, const Sheet&) = default;
};

enum class CalcMode { kAutomatic, kManual };

struct WorkbookSettings {
  CalcMode calc_mode = CalcMode::kAutomatic;

  friend bool operator==(const WorkbookSettings&,
                         const WorkbookSettings&) = default;
};

struct ScriptModule {
  std::string name;
  std::string source;

  friend bool operator==(const ScriptModule&, const ScriptModule&) = default;
};

struct Manifest {
  std::optional<std::string> title;
  std::optional<std::string> specification;
  std::map<std::string, std::string> assumptions;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct Workbook {
  Manifest manifest;
  WorkbookSettings settings;
  std::vector<Sheet> sheets;
  std::vector<ScriptModule> scripts;

  // Appends a sheet. Throws ValidationError if the name is empty or already
  // used (case-insensitively).
  Sheet& add_sheet(std::string name);

  std::optional<int> find_sheet(std::string_view name) const;
  const Cell* cell(const CellKey& key) const;
  std::optional<CellKey> key_of(const CellAddress& address) const;
  CellAddress address_of(const CellKey& key) const;

  friend bool operator==(const Workbook&, const Workbook&) = default;
};

// Parses and validates the JSON interchange format. Throws FormatError
// (schema), ValidationError (invariants) or ParseError (formula syntax).
Workbook parse_workbook(std::string_view json_text);

// Reads `path` then parses it. Throws IoError when the file cannot be read.
Workbook load_workbook(const std::filesystem::path& path);

// Serializes to the interchange format. parse_workbook(dump_workbook(wb))
// reproduces wb.
std::string dump_workbook(const Workbook& wb);

// Checks the cross-cell invariants: unique sheet names, nonempty sheet list,
// formula syntax, and that every non-external sheet reference resolves.
void validate_workbook(const Workbook& wb);

std::size_t formula_cells(const Workbook& wb);
std::size_t value_cells(const Workbook& wb);
std::size_t stored_cells(const Workbook& wb);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_WORKBOOK_H_
