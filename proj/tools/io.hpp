#ifndef ETEA_TOOLS_IO_HPP
#define ETEA_TOOLS_IO_HPP

// CSV and file helpers for the etea command-line tool.
//
// Signals are one sample per row. A single leading header row is detected
// when its first field is not a number. Files are written to a temporary
// sibling and renamed into place, so a failed run leaves no partial output.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace etea::tools {

/// Unreadable, unwritable or malformed files. Maps to exit status 2.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> header;           ///< empty when the file has none
  std::vector<std::vector<double>> columns;  ///< column-major

  /// Index of a named column, or -1.
  int find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

inline bool parse_number(std::string_view field, double& value) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && end == field.data() + field.size();
}

} // namespace detail

/// Reads a numeric CSV table. Blank lines are skipped; every data row must
/// have the same number of finite numeric fields.
inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Table table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && detail::parse_number(fields[i], row[i]);
    if (first && !numeric) {
      double ignored = 0.0;
      if (detail::parse_number(fields.front(), ignored))
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed first row");
      for (auto f : fields) table.header.emplace_back(f);
      width = fields.size();
      table.columns.resize(width);
      first = false;
      continue;
    }
    if (first) {
      width = fields.size();
      table.columns.resize(width);
      first = false;
    }
    if (!numeric)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
    if (fields.size() != width)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                    " fields, found " + std::to_string(fields.size()));
    for (std::size_t i = 0; i < width; ++i) {
      if (!std::isfinite(row[i]))
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
      table.columns[i].push_back(row[i]);
    }
  }
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  if (table.columns.empty() || table.columns.front().empty())
    throw IoError("'" + path.string() + "' contains no numeric samples");
  return table;
}

/// 17 significant digits: reads back to the same double.
inline std::string format_number(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

/// Writes `content` to `path` through a temporary file and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("error while writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

/// CSV text with a header row; all columns must have equal length.
inline std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_number(columns[c][r]);
    out << '\n';
  }
  return out.str();
}

} // namespace etea::tools

#endif // ETEA_TOOLS_IO_HPP
