#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hlc {

/// Column-major numeric table, the in-memory form of every CSV artifact.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  bool has(const std::string& name) const;
  /// Throws InvalidParameter naming the missing column and the available ones.
  const std::vector<double>& column(const std::string& name) const;
  void add(std::string name, std::vector<double> values);
};

/// %.17g, which round-trips every finite double exactly.
std::string format_double(double x);

/// "# config_hash: <hash>" line, a header row, then one row per entry.
void write_table(std::ostream& out, const Table& table, const std::string& config_hash);
void write_table(const std::filesystem::path& path, const Table& table, const std::string& config_hash);

struct TableFile {
  std::string config_hash;
  Table table;
};

/// Inverse of write_table; throws FormatError on malformed input.
TableFile read_table(std::istream& in);
TableFile read_table(const std::filesystem::path& path);

}  // namespace hlc
