#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace qbc::report {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  explicit Table(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}
  void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };
Format parse_format(const std::string& name);

// Doubles use 17 significant digits so text output round-trips exactly.
std::string format_cell(const Cell& c);

void write_csv(std::ostream& out, const Table& t);
// {"columns": [...], "rows": [{"col": value, ...}, ...]}
void write_json(std::ostream& out, const Table& t);
void write(std::ostream& out, const Table& t, Format f);

// Integers, then doubles, then strings.
Cell parse_cell(const std::string& text);
Table read_csv(std::istream& in);
Table read_json(std::istream& in);

}  // namespace qbc::report
