#pragma once

#include <cstddef>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/sim.hpp"

namespace seqlab::io {

// Shortest round-trip is not used: values are printed with a fixed number of
// significant digits in the C locale.
std::string format_double(double x, int digits = 10);

// Strict parse of a whole field; throws DataError on anything else.
double parse_double(std::string_view field, std::size_t line);

struct Row {
  double t;
  std::vector<double> x;
};

// Streaming reader for `t,x` / `t,x1,...,xN` files. The header is required
// and fixes the column count. Rows must have strictly increasing t.
class CsvReader {
 public:
  // columns = 0 accepts any number of value columns.
  explicit CsvReader(std::istream& in, std::size_t columns = 0);
  explicit CsvReader(const std::string& path, std::size_t columns = 0);

  std::size_t columns() const { return columns_; }
  std::size_t line() const { return line_; }
  std::optional<Row> next();

 private:
  void read_header(std::size_t expected);

  std::ifstream file_;
  std::istream* in_;
  std::size_t columns_ = 0;
  std::size_t line_ = 0;
  std::optional<double> last_t_;
};

// Reads the first value column of every row into memory.
std::vector<double> read_series(const std::string& path);

enum class ReportFormat { csv, kv };

void emit_report(std::ostream& out, std::span<const SimReport> reports, ReportFormat format);
void emit_report(const std::string& path, std::span<const SimReport> reports,
                 ReportFormat format);

// `key = value` lines with `#` comments.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& source = "<input>");
  static KeyValues load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

  // Throws ConfigError naming the first key that is not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

}  // namespace seqlab::io
