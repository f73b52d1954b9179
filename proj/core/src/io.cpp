#include "seqlab/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "seqlab/errors.hpp"

namespace seqlab::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      return out;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::string format_double(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field.empty()) throw DataError(at_line(line) + "empty field");
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw DataError(at_line(line) + "not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) throw DataError(at_line(line) + "non-finite value");
  return v;
}

CsvReader::CsvReader(std::istream& in, std::size_t columns) : in_(&in) { read_header(columns); }

CsvReader::CsvReader(const std::string& path, std::size_t columns)
    : file_(path), in_(&file_) {
  if (!file_) throw DataError("cannot open input file '" + path + "'");
  read_header(columns);
}

void CsvReader::read_header(std::size_t expected) {
  std::string text;
  while (std::getline(*in_, text)) {
    ++line_;
    if (!trim(text).empty()) break;
  }
  if (trim(text).empty()) throw DataError("input has no header row");
  const auto fields = split_commas(text);
  if (fields.size() < 2 || fields[0] != "t") {
    throw DataError(at_line(line_) + "header must be 't,x' or 't,x1,...,xN'");
  }
  for (std::size_t k = 1; k < fields.size(); ++k) {
    if (fields[k].empty()) throw DataError(at_line(line_) + "empty column name");
  }
  columns_ = fields.size() - 1;
  if (expected != 0 && columns_ != expected) {
    throw DataError(at_line(line_) + "expected " + std::to_string(expected) +
                    " value column(s), found " + std::to_string(columns_));
  }
}

std::optional<Row> CsvReader::next() {
  std::string text;
  while (std::getline(*in_, text)) {
    ++line_;
    if (trim(text).empty()) continue;
    const auto fields = split_commas(text);
    if (fields.size() != columns_ + 1) {
      throw DataError(at_line(line_) + "expected " + std::to_string(columns_ + 1) +
                      " fields, found " + std::to_string(fields.size()));
    }
    Row row;
    row.t = parse_double(fields[0], line_);
    if (last_t_ && !(row.t > *last_t_)) throw DataError(at_line(line_) + "t is not increasing");
    last_t_ = row.t;
    row.x.reserve(columns_);
    for (std::size_t k = 1; k < fields.size(); ++k) row.x.push_back(parse_double(fields[k], line_));
    return row;
  }
  return std::nullopt;
}

std::vector<double> read_series(const std::string& path) {
  CsvReader reader(path);
  std::vector<double> xs;
  while (auto row = reader.next()) xs.push_back(row->x[0]);
  return xs;
}

void emit_report(std::ostream& out, std::span<const SimReport> reports, ReportFormat format) {
  if (format == ReportFormat::csv) {
    out << "name,estimate,std_error,reps,seed,wall_time\n";
    for (const auto& r : reports) {
      out << r.name << ',' << format_double(r.estimate) << ',' << format_double(r.std_error)
          << ',' << r.reps << ',' << r.seed << ',' << format_double(r.wall_time) << '\n';
    }
    return;
  }
  for (const auto& r : reports) {
    out << r.name << ".estimate = " << format_double(r.estimate) << '\n';
    out << r.name << ".std_error = " << format_double(r.std_error) << '\n';
    out << r.name << ".reps = " << r.reps << '\n';
    out << r.name << ".seed = " << r.seed << '\n';
    out << r.name << ".wall_time = " << format_double(r.wall_time) << '\n';
  }
}

void emit_report(const std::string& path, std::span<const SimReport> reports,
                 ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file '" + path + "'");
  emit_report(out, reports, format);
}

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  kv.source_ = source;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::string_view s(text);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
    if (kv.values_.count(key)) {
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = value;
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

std::string KeyValues::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    return parse_double(v, 0);
  } catch (const DataError&) {
    throw ConfigError("key '" + key + "' is not a number: '" + v + "'");
  }
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValues::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  long long out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "' is not an integer: '" + v + "'");
  }
  return out;
}

long long KeyValues::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::vector<double> KeyValues::get_list(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  for (auto field : split_commas(v)) {
    try {
      out.push_back(parse_double(field, 0));
    } catch (const DataError&) {
      throw ConfigError("key '" + key + "' is not a comma-separated list of numbers");
    }
  }
  return out;
}

std::vector<double> KeyValues::get_list(const std::string& key,
                                        std::vector<double> fallback) const {
  return has(key) ? get_list(key) : fallback;
}

void KeyValues::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

void KeyValues::write(std::ostream& out) const {
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
}

}  // namespace seqlab::io
