#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "tlc/errors.hpp"

namespace tlc::cli {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for the rest.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header) : path_(path), out_(path) {
    if (!out_) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
    out_ << header << '\n';
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::kIoFailure, "failed writing " + path_.string());
  }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename Int>
    requires std::is_integral_v<Int>
  static std::string cell(Int v) { return std::to_string(v); }

  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace tlc::cli
