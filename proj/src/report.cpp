#include "qbc/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "qbc/errors.hpp"

namespace qbc::report {
namespace {

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

// Splits one CSV record; quoted fields may span lines.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& lineno) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++lineno;
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++lineno;
      fields.push_back(std::move(field));
      return true;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", lineno + 1);
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

nlohmann::json to_json_value(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, c);
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ValidationError("row width does not match the header");
  rows.push_back(std::move(row));
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ValidationError("unknown output format '" + name + "' (csv or json)");
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double d = std::get<double>(c);
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s = buf;
  // Keep doubles distinguishable from integers in text form.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << quote_csv(t.columns[i]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quote_csv(format_cell(row[i]));
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& t) {
  nlohmann::json j;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = to_json_value(row[i]);
    j["rows"].push_back(std::move(obj));
  }
  out << j.dump(2) << '\n';
}

void write(std::ostream& out, const Table& t, Format f) {
  if (f == Format::csv)
    write_csv(out, t);
  else
    write_json(out, t);
}

Cell parse_cell(const std::string& text) {
  std::int64_t i = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc() && p == last && !text.empty()) return i;
  if (text == "nan" || text == "inf" || text == "-inf") return std::stod(text);
  if (!text.empty() && text.find_first_not_of("0123456789+-.eE") == std::string::npos) {
    try {
      std::size_t used = 0;
      const double d = std::stod(text, &used);
      if (used == text.size()) return d;
    } catch (const std::exception&) {
    }
  }
  return text;
}

Table read_csv(std::istream& in) {
  std::vector<std::string> fields;
  std::size_t lineno = 0;
  if (!read_record(in, fields, lineno)) throw ParseError("missing CSV header", 1);
  Table t(fields);
  while (read_record(in, fields, lineno)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != t.columns.size()) throw ParseError("row width does not match the header", lineno);
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_cell(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 1);
  }
  Table t(j.at("columns").get<std::vector<std::string>>());
  for (const auto& obj : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& col : t.columns) {
      const auto& v = obj.at(col);
      if (v.is_number_integer())
        row.emplace_back(v.get<std::int64_t>());
      else if (v.is_number())
        row.emplace_back(v.get<double>());
      else if (v.is_string())
        row.emplace_back(v.get<std::string>());
      else
        throw ValidationError("unsupported JSON cell in column " + col);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace qbc::report
