#include "hlc/table.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hlc/errors.hpp"

namespace hlc {

bool Table::has(const std::string& name) const {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return data[j];
  std::string known;
  for (const auto& c : columns) known += (known.empty() ? "" : ", ") + c;
  throw InvalidParameter("missing column '" + name + "'; available: " + known);
}

void Table::add(std::string name, std::vector<double> values) {
  if (!data.empty() && values.size() != rows())
    throw DimensionMismatch("column '" + name + "' has " + std::to_string(values.size()) + " rows, table has " +
                            std::to_string(rows()));
  columns.push_back(std::move(name));
  data.push_back(std::move(values));
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_table(std::ostream& out, const Table& table, const std::string& config_hash) {
  out << "# config_hash: " << config_hash << "\n";
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
  out << "\n";
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << format_double(table.data[j][i]);
    out << "\n";
  }
}

void write_table(const std::filesystem::path& path, const Table& table, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_table(out, table, config_hash);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t offset) {
  // from_chars rejects a leading '+', which %.17g never emits.
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw FormatError("not a number: '" + s + "'", offset);
  }
  return v;
}

}  // namespace

TableFile read_table(std::istream& in) {
  TableFile f;
  std::string line;
  std::size_t offset = 0;
  const std::string prefix = "# config_hash: ";
  if (!std::getline(in, line) || line.rfind(prefix, 0) != 0)
    throw FormatError("expected '" + prefix + "<hash>' on the first line", 0);
  f.config_hash = line.substr(prefix.size());
  offset += line.size() + 1;
  if (!std::getline(in, line)) throw FormatError("missing header row", offset);
  f.table.columns = split(line);
  f.table.data.assign(f.table.columns.size(), {});
  offset += line.size() + 1;
  while (std::getline(in, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != f.table.columns.size())
      throw FormatError("row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(f.table.columns.size()),
                        offset);
    for (std::size_t j = 0; j < cells.size(); ++j) f.table.data[j].push_back(parse_double(cells[j], offset));
    offset += line.size() + 1;
  }
  return f;
}

TableFile read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_table(in);
}

}  // namespace hlc
