#pragma once

#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvar/common.hpp"

namespace wvar {

/// Shortest round-trip-safe rendering with 17 significant digits.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// In-memory CSV table with CRLF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(const std::string& s) {
      cells_.push_back(csv_field(s));
      return *this;
    }
    Row& operator<<(const char* s) { return *this << std::string(s); }
    Row& operator<<(double v) {
      cells_.push_back(format_double(v));
      return *this;
    }
    Row& operator<<(long long v) {
      cells_.push_back(std::to_string(v));
      return *this;
    }
    Row& operator<<(unsigned long long v) {
      cells_.push_back(std::to_string(v));
      return *this;
    }
    Row& operator<<(long v) { return *this << static_cast<long long>(v); }
    Row& operator<<(unsigned long v) { return *this << static_cast<unsigned long long>(v); }
    Row& operator<<(int v) { return *this << static_cast<long long>(v); }
    Row& operator<<(bool v) { return *this << std::string(v ? "true" : "false"); }

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  Row& row() {
    rows_.emplace_back();
    return rows_.back();
  }

  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells, bool quote) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << (quote ? csv_field(cells[i]) : cells[i]);
      }
      os << "\r\n";
    };
    line(header_, true);
    for (const auto& r : rows_) {
      if (r.cells_.size() != header_.size()) throw Error("CsvTable: row width differs from header");
      line(r.cells_, false);
    }
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

inline void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

/// UTC timestamp in ISO 8601.
inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Flat key-value configuration
// ---------------------------------------------------------------------------

/// Lines of the form `key = value`; `#` starts a comment; blank lines ignored.
/// Keys are case-sensitive; later duplicates override earlier ones.
inline std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace wvar
